#include "pimhem/ergodicity.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace pimhem {

void DriftMinorisation::validate() const {
    if (!(lambda >= 0.0 && lambda < 1.0))
        throw std::invalid_argument("drift: lambda must lie in [0, 1)");
    if (!(b >= 0.0)) throw std::invalid_argument("drift: b must be >= 0");
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("drift: delta must lie in (0, 1]");
    if (!(v >= 1.0)) throw std::invalid_argument("drift: v must be >= 1");
}

ErgodicityBound meyn_tweedie_constants(const DriftMinorisation& dm, double r,
                                       MeynTweedieOptions opts) {
    dm.validate();
    if (!(r > 0.0 && r <= 1.0))
        throw std::invalid_argument("meyn_tweedie_constants: r must lie in (0, 1]");

    double c_r, lambda_r, bbar_r;
    if (r == 1.0) {
        c_r = kMeynTweedieConstant;
        lambda_r = dm.lambda;
        bbar_r = dm.b_bar();
    } else {
        c_r = std::pow(2.0 / r, 4.0) * kMeynTweedieConstant;
        lambda_r = std::pow(dm.lambda, r);
        bbar_r = 2.0 * std::pow(dm.b_bar(), r);
    }

    const double shape = std::pow(1.0 - lambda_r, -4.0) *
                         std::pow(dm.delta, -13.0) * std::pow(bbar_r, 6.0);
    const double rate_bracket = opts.tight_rate && r == 1.0
                                    ? 100000.0 * shape
                                    : c_r * shape;

    ErgodicityBound out;
    out.rate = 1.0 - 1.0 / rate_bracket;
    // The bracket easily exceeds 1/ulp, where 1 - 1/bracket rounds to 1.
    // The mathematical rate is strictly below 1, so keep it representable.
    if (out.rate >= 1.0) out.rate = std::nextafter(1.0, 0.0);
    out.multiplier = c_r * std::pow(1.0 - lambda_r, -4.0) *
                     std::pow(dm.delta, -15.0) * std::pow(bbar_r, 7.0);
    return out;
}

ImhDrift imh_drift(double epsilon, double qV) {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw std::invalid_argument("imh_drift: epsilon must lie in (0, 1]");
    if (!(qV >= 1.0 && std::isfinite(qV)))
        throw std::invalid_argument("imh_drift: qV must be finite and >= 1");
    return {1.0 - epsilon, qV};
}

double imh_bound_M(double epsilon, double qV) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("imh_bound_M: epsilon must lie in (0, 1)");
    return qV * (1.0 + 1.0 / epsilon + 1.0 / (1.0 - epsilon));
}

ErgodicityBound imh_geometric_constants(double epsilon, double qV,
                                        double zeta) {
    if (epsilon == 1.0)
        throw std::invalid_argument(
            "imh_geometric_constants: epsilon = 1 means the proposal equals "
            "the target and the chain couples in one step; the constant M is "
            "infinite by its (1-epsilon)^-1 term");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument(
            "imh_geometric_constants: epsilon must lie in (0, 1)");
    if (!(zeta > 0.0 && zeta < 1.0))
        throw std::invalid_argument(
            "imh_geometric_constants: zeta must lie in (0, 1)");

    const double M = imh_bound_M(epsilon, qV);
    const double e = std::exp(1.0);
    double M_prime;
    if (epsilon <= 0.5) {
        M_prime = 2.0 * M / (e * (1.0 - zeta) * epsilon);
    } else {
        M_prime = (M / e) / std::log((1.0 - zeta * epsilon) / (1.0 - epsilon));
    }
    return {M_prime, 1.0 - zeta * epsilon};
}

void FiniteImhChain::validate() const {
    const std::size_t s = target.size();
    if (s == 0 || proposal.size() != s || V.size() != s)
        throw std::invalid_argument("finite chain: inconsistent sizes");
    if (s > 64)
        throw std::invalid_argument("finite chain: at most 64 states supported");
    double tsum = 0.0, qsum = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
        if (!(target[i] > 0.0))
            throw std::invalid_argument("finite chain: target entries must be > 0");
        if (!(proposal[i] > 0.0))
            throw std::invalid_argument(
                "finite chain: zero proposal entry, epsilon undefined");
        if (!(V[i] >= 1.0))
            throw std::invalid_argument("finite chain: V entries must be >= 1");
        tsum += target[i];
        qsum += proposal[i];
    }
    if (std::abs(tsum - 1.0) > 1e-12 || std::abs(qsum - 1.0) > 1e-12)
        throw std::invalid_argument("finite chain: vectors must sum to 1");
}

double FiniteImhChain::epsilon() const {
    double eps = proposal[0] / target[0];
    for (std::size_t i = 1; i < size(); ++i)
        eps = std::min(eps, proposal[i] / target[i]);
    return eps;
}

double FiniteImhChain::qV() const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += proposal[i] * V[i];
    return s;
}

std::vector<double> FiniteImhChain::transition_matrix() const {
    validate();
    const std::size_t s = size();
    // r(x) = pi(x)/q(x); proposal y from x accepted with min{1, r(y)/r(x)}.
    std::vector<double> r(s);
    for (std::size_t i = 0; i < s; ++i) r[i] = target[i] / proposal[i];
    std::vector<double> P(s * s, 0.0);
    for (std::size_t x = 0; x < s; ++x) {
        double rejected = 0.0;
        for (std::size_t y = 0; y < s; ++y) {
            if (y == x) continue;
            const double a = std::min(1.0, r[y] / r[x]);
            P[x * s + y] = a * proposal[y];
            rejected += (1.0 - a) * proposal[y];
        }
        P[x * s + x] = proposal[x] + rejected;
    }
    return P;
}

ImhVerifyReport verify_bound_on_finite_chain(const FiniteImhChain& chain,
                                             const std::vector<double>& f,
                                             double zeta, int k_max) {
    chain.validate();
    const std::size_t s = chain.size();
    if (f.size() != s)
        throw std::invalid_argument("verify: f has wrong length");
    if (k_max < 1) throw std::invalid_argument("verify: k_max must be >= 1");

    const double eps_exact = chain.epsilon();
    // epsilon = 1 only when q == pi; cap it so the bound stays finite.
    const double eps = std::min(eps_exact, 1.0 - 1e-9);
    const double qV = chain.qV();
    const double M = imh_bound_M(eps, qV);
    const auto geom = imh_geometric_constants(eps, qV, zeta);

    double f_norm = 0.0;
    double pi_f = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
        f_norm = std::max(f_norm, std::abs(f[i]) / chain.V[i]);
        pi_f += chain.target[i] * f[i];
    }
    if (f_norm == 0.0) return {eps_exact, 0.0, 0.0};

    const auto P = chain.transition_matrix();
    std::vector<double> pf = f;  // P^k f, updated in place
    ImhVerifyReport rep;
    rep.epsilon = eps_exact;
    std::vector<double> next(s);
    for (int k = 1; k <= k_max; ++k) {
        for (std::size_t x = 0; x < s; ++x) {
            double acc = 0.0;
            for (std::size_t y = 0; y < s; ++y) acc += P[x * s + y] * pf[y];
            next[x] = acc;
        }
        pf.swap(next);
        const double lin_k = k * M * std::pow(1.0 - eps, k);
        const double geo_k = geom.multiplier * std::pow(geom.rate, k);
        for (std::size_t x = 0; x < s; ++x) {
            const double err = std::abs(pf[x] - pi_f);
            const double scale = f_norm * chain.V[x];
            // Matrix powers bottom out at roundoff while the bound keeps
            // shrinking geometrically; below this floor the chain has
            // converged as far as doubles can tell.
            if (err <= 1e-10 * scale) continue;
            rep.max_ratio_linear =
                std::max(rep.max_ratio_linear, err / (lin_k * scale));
            rep.max_ratio_geometric =
                std::max(rep.max_ratio_geometric, err / (geo_k * scale));
        }
    }
    return rep;
}

}  // namespace pimhem
