#include "pimhem/smc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace pimhem {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(sum(exp(v))) guarded against all -inf.
double log_sum_exp(const std::vector<double>& v) {
    double m = kNegInf;
    for (double x : v) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

/// Multinomial resampling: N categorical draws from the normalized weights
/// via CDF inversion.
void multinomial_resample(const std::vector<double>& weights, RngStream& rng,
                          std::vector<int>& out) {
    const std::size_t N = weights.size();
    std::vector<double> cdf(N);
    double acc = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
        acc += weights[j];
        cdf[j] = acc;
    }
    cdf[N - 1] = 1.0;
    for (std::size_t j = 0; j < N; ++j) {
        const double u = rng.uniform();
        out[j] = static_cast<int>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    }
}

}  // namespace

PfOutput run_particle_filter(const StateSpaceModel& model, std::size_t N,
                             RngStream& rng) {
    const std::size_t n = model.length();
    if (N < 1) throw std::invalid_argument("particle filter: N must be >= 1");
    if (n < 1) throw std::invalid_argument("particle filter: n must be >= 1");

    PfOutput pf;
    pf.n = n;
    pf.N = N;
    pf.particles.resize(n * N);
    pf.ancestors.resize((n - 1) * N);
    pf.final_weights.assign(N, 0.0);
    pf.max_log_weight = kNegInf;

    std::vector<double> log_w(N);
    std::vector<double> norm_w(N);
    std::vector<double> prev(N);
    std::vector<int> idx(N);

    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t j = 0; j < N; ++j) {
            const double x = (t == 0) ? model.sample_initial(rng)
                                      : model.sample_transition(prev[j], rng);
            pf.particles[t * N + j] = x;
            log_w[j] = model.log_weight(x, t + 1);
            pf.max_log_weight = std::max(pf.max_log_weight, log_w[j]);
        }
        const double lse = log_sum_exp(log_w);
        if (lse == kNegInf)
            throw std::runtime_error("particle filter: particle degeneracy at t=" +
                                     std::to_string(t + 1));
        pf.log_z_hat += lse - std::log(static_cast<double>(N));
        for (std::size_t j = 0; j < N; ++j) norm_w[j] = std::exp(log_w[j] - lse);

        if (t + 1 < n) {
            multinomial_resample(norm_w, rng, idx);
            for (std::size_t j = 0; j < N; ++j) {
                pf.ancestors[t * N + j] = idx[j];
                prev[j] = pf.particles[t * N + idx[j]];
            }
        } else {
            pf.final_weights = norm_w;
        }
    }
    return pf;
}

std::vector<double> extract_path(const PfOutput& pf, std::size_t k) {
    if (k >= pf.N) throw std::invalid_argument("extract_path: bad particle index");
    std::vector<double> path(pf.n);
    std::size_t b = k;
    path[pf.n - 1] = pf.particle(pf.n - 1, b);
    for (std::size_t t = pf.n - 1; t-- > 0;) {
        b = static_cast<std::size_t>(pf.ancestor(t, b));
        path[t] = pf.particle(t, b);
    }
    return path;
}

double weighted_statistic(
    const PfOutput& pf,
    const std::function<double(const std::vector<double>&)>& t) {
    double acc = 0.0;
    for (std::size_t k = 0; k < pf.N; ++k) {
        const double val = t(extract_path(pf, k));
        if (!std::isfinite(val))
            throw std::runtime_error(
                "weighted_statistic: non-finite statistic on particle " +
                std::to_string(k));
        acc += pf.final_weights[k] * val;
    }
    return acc;
}

void dump_pf_output(std::ostream& out, const PfOutput& pf) {
    out << "# t j particle ancestor final_weight\n";
    for (std::size_t t = 0; t < pf.n; ++t) {
        for (std::size_t j = 0; j < pf.N; ++j) {
            out << (t + 1) << ' ' << (j + 1) << ' ' << pf.particle(t, j) << ' ';
            if (t + 1 < pf.n)
                out << (pf.ancestor(t, j) + 1);
            else
                out << '-';
            out << ' ';
            if (t + 1 == pf.n)
                out << pf.final_weights[j];
            else
                out << '-';
            out << '\n';
        }
    }
    out << "# log_z_hat " << pf.log_z_hat << '\n';
}

double reevaluate_log_z(const PfOutput& pf, const StateSpaceModel& model) {
    if (model.length() != pf.n)
        throw std::invalid_argument("reevaluate_log_z: length mismatch");
    double log_z = 0.0;
    std::vector<double> log_w(pf.N);
    for (std::size_t t = 0; t < pf.n; ++t) {
        for (std::size_t j = 0; j < pf.N; ++j)
            log_w[j] = model.log_weight(pf.particle(t, j), t + 1);
        const double lse = log_sum_exp(log_w);
        if (lse == kNegInf)
            throw std::runtime_error("reevaluate_log_z: degenerate weights");
        log_z += lse - std::log(static_cast<double>(pf.N));
    }
    return log_z;
}

bool pimh_step(PimhState& state, const StateSpaceModel& model, std::size_t N,
               RngStream& pf_rng, RngStream& accept_rng, PimhOptions opts) {
    PfOutput proposal = run_particle_filter(model, N, pf_rng);
    const double log_z_current = opts.recompute_on_compare
                                     ? reevaluate_log_z(state.current, model)
                                     : state.current.log_z_hat;
    const double log_ratio = proposal.log_z_hat - log_z_current;
    const double u = accept_rng.uniform();
    const bool accept = log_ratio >= 0.0 || u < std::exp(log_ratio);
    if (accept) state.current = std::move(proposal);
    return accept;
}

}  // namespace pimhem
