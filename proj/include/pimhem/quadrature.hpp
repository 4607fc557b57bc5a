#pragma once

#include <cstddef>
#include <vector>

#include "pimhem/poisson_ar1.hpp"

namespace pimhem {

/// Tensor-product Gauss-Hermite oracle configuration.
struct QuadratureSpec {
    int nodes_per_dim = 40;
    int max_dim = 3;

    void validate() const;
};

/// Physicists' Gauss-Hermite rule: integral of exp(-u^2) f(u) du is
/// approximately sum of weights[i] * f(nodes[i]).
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(int order);

/// Stationary AR(1) covariance Sigma_ij = sigma_Z^2 rho^|i-j|, lower
/// Cholesky factor, row-major n x n.
std::vector<double> stationary_cholesky(std::size_t n, double rho,
                                        double sigma2);

struct PosteriorMoments {
    double log_likelihood;    // log p(y_{1:n}) under the given parameters
    double posterior_mean_t;  // E[t(X_{1:n}) | y_{1:n}]
};

/// Exact (up to quadrature error) likelihood and posterior mean of the
/// sufficient statistic for n <= max_dim, computed against the stationary
/// Gaussian prior with the Poisson factor inside the integrand. All
/// accumulation happens in log space.
PosteriorMoments posterior_moments(const Dataset& data,
                                   const ModelParams& params,
                                   const QuadratureSpec& quad);

/// Quadrature evaluation of the mean field
/// h(theta) = E_{alpha_hat(theta)}[t(X_{1:n})] - theta.
double mean_field_oracle(double theta, const Dataset& data, double rho,
                         double sigma2, const QuadratureSpec& quad);

}  // namespace pimhem
