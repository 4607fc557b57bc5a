#pragma once

#include <vector>

namespace pimhem {

/// Drift and minorisation inputs: PV <= lambda*V + b off the small set C,
/// P(x,.) >= delta*nu(.) on C, v = sup of V on C.
struct DriftMinorisation {
    double lambda;  // in [0, 1)
    double b;       // >= 0
    double delta;   // in (0, 1]
    double v;       // >= 1

    double b_bar() const { return b > v ? b : v; }
    void validate() const;
};

/// Geometric convergence bound in a V-weighted norm:
/// |P^k f(x) - pi(f)| <= multiplier * rate^k * ||f||_V * V(x).
struct ErgodicityBound {
    double multiplier;  // >= 1
    double rate;        // in (0, 1)
};

inline constexpr double kMeynTweedieConstant = 336140.0;

struct MeynTweedieOptions {
    /// Use the sharper rate bracket constant 100000 from the r=1 derivation
    /// instead of the single conservative constant used for the multiplier.
    bool tight_rate = false;
};

/// Quantitative geometric ergodicity from drift and minorisation, for the
/// V^r norm with r in (0, 1]:
///   rate_r = 1 - [c_r * (1-lambda_r)^-4 * delta^-13 * bbar_r^6]^-1
///   mult_r = c_r * (1-lambda_r)^-4 * delta^-15 * bbar_r^7
/// with c_1 = 336140 and, for r < 1, c_r = (2/r)^4 * c_1, lambda_r =
/// lambda^r and bbar_r = 2 * bbar^r.
ErgodicityBound meyn_tweedie_constants(const DriftMinorisation& dm, double r,
                                       MeynTweedieOptions opts = {});

struct ImhDrift {
    double rho;  // 1 - epsilon
    double b;    // q(V)
};

/// Drift constants for an independent Metropolis-Hastings kernel with
/// proposal/target density ratio bounded below by epsilon:
/// PV(x) <= (1 - epsilon) V(x) + q(V).
ImhDrift imh_drift(double epsilon, double qV);

/// The k-linear ergodicity bound constant for IMH:
/// |P^k f(x) - pi(f)| <= k * M * (1-epsilon)^k * ||f||_V * V(x) with
/// M = q(V) * [1 + 1/epsilon + 1/(1-epsilon)].
double imh_bound_M(double epsilon, double qV);

/// The purely geometric form: |P^k f - pi(f)| <= M' (1 - zeta*epsilon)^k ...
/// with M' = 2M/(e (1-zeta) epsilon) when epsilon <= 1/2, and
/// M' = (M/e) / log((1 - zeta*epsilon)/(1 - epsilon)) otherwise.
/// epsilon = 1 is rejected: the chain couples in one step and M is infinite.
ErgodicityBound imh_geometric_constants(double epsilon, double qV, double zeta);

/// A finite-state independent Metropolis-Hastings chain used as an exact
/// oracle against the closed-form bounds.
struct FiniteImhChain {
    std::vector<double> target;    // pi, all entries > 0, sums to 1
    std::vector<double> proposal;  // q, all entries > 0, sums to 1
    std::vector<double> V;         // weights >= 1

    std::size_t size() const { return target.size(); }
    void validate() const;

    /// epsilon = min_s q(s) / pi(s).
    double epsilon() const;
    double qV() const;

    /// Exact row-stochastic IMH transition matrix (row-major, S x S).
    std::vector<double> transition_matrix() const;
};

struct ImhVerifyReport {
    double epsilon = 0.0;
    /// max over x, k of |P^k f(x) - pi(f)| / [k M (1-eps)^k ||f||_V V(x)]
    double max_ratio_linear = 0.0;
    /// same against the geometric bound M' (1 - zeta*eps)^k
    double max_ratio_geometric = 0.0;
};

/// Verifies both closed-form bounds against exact matrix powers of the
/// finite chain. For the degenerate case epsilon = 1 the bound is evaluated
/// at epsilon = 1 - 1e-9. Errors below 1e-10 * ||f||_V * V(x) are treated
/// as converged-to-roundoff and excluded from the ratios.
ImhVerifyReport verify_bound_on_finite_chain(const FiniteImhChain& chain,
                                             const std::vector<double>& f,
                                             double zeta, int k_max);

}  // namespace pimhem
