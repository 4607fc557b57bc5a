#include "pimhem/sa.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pimhem {

TraceRecord sa_step(SaState& state, SaProblem& problem, const SaConfig& config,
                    RngStream& gate_rng) {
    const long i_next = state.i + 1;
    const double h = problem.advance(state.theta);
    const double gamma = config.schedule.next(i_next, gate_rng.uniform());
    const double theta_star = state.theta + gamma * h;
    if (!std::isfinite(theta_star))
        throw std::runtime_error("sa_step: non-finite iterate at iteration " +
                                 std::to_string(i_next) +
                                 " (theta=" + std::to_string(state.theta) +
                                 ", H=" + std::to_string(h) + ")");
    const auto pr =
        project(config.projection, config.policy, i_next, theta_star, state.theta);
    state.i = i_next;
    state.theta = pr.theta;

    TraceRecord rec;
    rec.iteration = i_next;
    rec.theta = pr.theta;
    rec.derived_parameter = problem.derived_parameter(pr.theta);
    rec.gamma = gamma;
    rec.accepted = problem.last_accepted();
    rec.projected = pr.projected;
    rec.lower_bound = config.projection.lower(i_next);
    rec.upper_bound = config.projection.upper(i_next);
    return rec;
}

SaRunResult run(const SaConfig& config, SaProblem& problem,
                std::uint64_t seed) {
    if (config.n_iterations < 0)
        throw std::invalid_argument("run: n_iterations must be >= 0");
    problem.seed(seed);
    RngStream gate_rng = RngStream(seed).substream("step-size-gate");

    SaState state;
    const double raw0 = problem.initial_theta();
    const auto init =
        project(config.projection, ProjectionPolicy::Clamp, 0, raw0, raw0);
    state.theta = init.theta;

    SaRunResult result;
    TraceRecord rec0;
    rec0.iteration = 0;
    rec0.theta = state.theta;
    rec0.derived_parameter = problem.derived_parameter(state.theta);
    rec0.accepted = true;
    rec0.projected = init.projected;
    rec0.lower_bound = config.projection.lower(0);
    rec0.upper_bound = config.projection.upper(0);
    result.trace.push_back(rec0);

    long n_projections = init.projected ? 1 : 0;
    long n_accepted = 0;
    const long thin = config.trace_every > 0 ? config.trace_every : 1;
    for (long i = 1; i <= config.n_iterations; ++i) {
        try {
            TraceRecord rec = sa_step(state, problem, config, gate_rng);
            if (rec.projected) ++n_projections;
            if (rec.accepted) ++n_accepted;
            if (i % thin == 0 || i == config.n_iterations)
                result.trace.push_back(rec);
        } catch (const std::exception& e) {
            throw std::runtime_error("run failed at iteration " +
                                     std::to_string(i) + ": " + e.what());
        }
    }

    result.summary.final_theta = state.theta;
    result.summary.final_alpha_hat = problem.derived_parameter(state.theta);
    result.summary.n_projections = n_projections;
    result.summary.acceptance_rate =
        config.n_iterations > 0
            ? static_cast<double>(n_accepted) / config.n_iterations
            : 0.0;
    result.summary.n_iterations = config.n_iterations;
    result.summary.seed = seed;
    return result;
}

}  // namespace pimhem
