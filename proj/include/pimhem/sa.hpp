#pragma once

#include <cstdint>
#include <vector>

#include "pimhem/projection.hpp"
#include "pimhem/rng.hpp"
#include "pimhem/step_size.hpp"
#include "pimhem/trace.hpp"

namespace pimhem {

/// A problem driven by the stochastic approximation loop: a parameterized
/// Markov kernel together with the update direction H(theta, x).
class SaProblem {
public:
    virtual ~SaProblem() = default;

    /// Derive the problem's internal random streams from the run seed.
    virtual void seed(std::uint64_t root_seed) = 0;

    /// Produce the raw initial iterate; the runner projects it into R_0.
    virtual double initial_theta() = 0;

    /// Advance the chain one step at parameter theta and return the observed
    /// update direction H(theta, X_{i+1}). Called on every iteration, even
    /// when the realized step size is zero.
    virtual double advance(double theta) = 0;

    /// Whether the last kernel move was an MCMC acceptance.
    virtual bool last_accepted() const { return true; }

    /// Application-level reparameterization of theta for reporting.
    virtual double derived_parameter(double theta) const { return theta; }
};

struct SaConfig {
    long n_iterations = 1;
    StepSizeSchedule schedule;
    ProjectionSchedule projection;
    ProjectionPolicy policy = ProjectionPolicy::Clamp;
    long trace_every = 1;  // emit every k-th record (the last is always kept)
};

struct SaState {
    long i = 0;
    double theta = 0.0;
};

struct SaRunResult {
    std::vector<TraceRecord> trace;
    RunSummary summary;
};

/// One iteration of the recursion: kernel move, step size draw, update,
/// projection. Throws on a non-finite proposed iterate.
TraceRecord sa_step(SaState& state, SaProblem& problem, const SaConfig& config,
                    RngStream& gate_rng);

/// Full run: initialization into R_0 followed by n_iterations steps.
/// Deterministic given the seed.
SaRunResult run(const SaConfig& config, SaProblem& problem,
                std::uint64_t seed);

}  // namespace pimhem
