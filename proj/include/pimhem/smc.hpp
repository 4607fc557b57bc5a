#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "pimhem/rng.hpp"

namespace pimhem {

/// State-space model interface for the bootstrap particle filter. The
/// proposal is the model transition, so the incremental weight is the
/// observation density alone.
class StateSpaceModel {
public:
    virtual ~StateSpaceModel() = default;

    virtual std::size_t length() const = 0;  // number of observations n
    virtual double sample_initial(RngStream& rng) const = 0;
    virtual double sample_transition(double x_prev, RngStream& rng) const = 0;
    /// Log of the unnormalised incremental weight at time t (1-based).
    /// Never +inf; -inf only for models with zero-density observations.
    virtual double log_weight(double x, std::size_t t) const = 0;
};

/// Full particle filter output: all propagated particles, the ancestor
/// genealogy, the final normalized weights and the likelihood estimate.
struct PfOutput {
    std::size_t n = 0;
    std::size_t N = 0;
    std::vector<double> particles;  // row-major n x N, pre-resampling states
    std::vector<int> ancestors;     // row-major (n-1) x N, values in [0, N)
    std::vector<double> final_weights;  // length N, sums to 1
    double log_z_hat = 0.0;
    /// Largest log incremental weight seen during the run.
    double max_log_weight = 0.0;

    double particle(std::size_t t, std::size_t j) const {
        return particles[t * N + j];
    }
    int ancestor(std::size_t t, std::size_t j) const {
        return ancestors[t * N + j];
    }
};

/// Bootstrap particle filter with multinomial resampling at every step.
/// Weight arithmetic is done in log space. Throws "particle degeneracy"
/// if all weights vanish at some step.
PfOutput run_particle_filter(const StateSpaceModel& model, std::size_t N,
                             RngStream& rng);

/// Traces the ancestral lineage of final-time particle k (0-based) and
/// returns the length-n path.
std::vector<double> extract_path(const PfOutput& pf, std::size_t k);

/// Sum over particles of W_k * t(path_k). Throws if t is non-finite on
/// some path.
double weighted_statistic(const PfOutput& pf,
                          const std::function<double(const std::vector<double>&)>& t);

/// Writes one row per particle per time step, for lineage inspection.
void dump_pf_output(std::ostream& out, const PfOutput& pf);

struct PimhOptions {
    /// Re-evaluate the retained filter's likelihood estimate at the current
    /// parameters before the comparison. Off by default: the stored estimate
    /// is reused as-is and refreshed only on acceptance.
    bool recompute_on_compare = false;
};

/// Particle independent Metropolis-Hastings state.
struct PimhState {
    PfOutput current;
};

/// One PIMH step at the current model parameters: run a fresh filter and
/// accept it with probability min{1, Zhat_new / Zhat_old}. Returns whether
/// the proposal was accepted. Draw order is fixed: filter first, then the
/// acceptance uniform.
bool pimh_step(PimhState& state, const StateSpaceModel& model, std::size_t N,
               RngStream& pf_rng, RngStream& accept_rng,
               PimhOptions opts = {});

/// Likelihood estimate of previously stored particles re-evaluated under
/// the given model (same particle positions, new weights).
double reevaluate_log_z(const PfOutput& pf, const StateSpaceModel& model);

}  // namespace pimhem
