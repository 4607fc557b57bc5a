#include "pimhem/quadrature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pimhem {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void QuadratureSpec::validate() const {
    if (nodes_per_dim < 20)
        throw std::invalid_argument("quadrature: need at least 20 nodes per dim");
    if (max_dim < 1 || max_dim > 3)
        throw std::invalid_argument("quadrature: max_dim must lie in [1, 3]");
}

GaussHermiteRule gauss_hermite(int order) {
    if (order < 1) throw std::invalid_argument("gauss_hermite: bad order");
    GaussHermiteRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int n = order;
    const int m = (n + 1) / 2;
    const double pim4 = 0.7511255444649425;  // pi^(-1/4)
    double z = 0.0, pp = 0.0;
    for (int i = 0; i < m; ++i) {
        // Standard initial approximations for the largest roots, then
        // Newton refinement on the orthonormal Hermite recurrence.
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) -
                1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * rule.nodes[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * rule.nodes[1];
        else
            z = 2.0 * z - rule.nodes[i - 2];
        for (int it = 0; it < 64; ++it) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
                     std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-14) break;
        }
        rule.nodes[i] = z;
        rule.nodes[n - 1 - i] = -z;
        rule.weights[i] = 2.0 / (pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

std::vector<double> stationary_cholesky(std::size_t n, double rho,
                                        double sigma2) {
    const double var = sigma2 / (1.0 - rho * rho);
    std::vector<double> sigma(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            sigma[i * n + j] =
                var * std::pow(rho, std::abs(static_cast<double>(i) -
                                             static_cast<double>(j)));
    std::vector<double> L(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = sigma[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= L[i * n + k] * L[j * n + k];
            if (i == j) {
                if (!(s > 0.0))
                    throw std::runtime_error("stationary_cholesky: not SPD");
                L[i * n + j] = std::sqrt(s);
            } else {
                L[i * n + j] = s / L[j * n + j];
            }
        }
    }
    return L;
}

PosteriorMoments posterior_moments(const Dataset& data,
                                   const ModelParams& params,
                                   const QuadratureSpec& quad) {
    quad.validate();
    params.validate();
    data.validate();
    const std::size_t n = data.n();
    if (n > static_cast<std::size_t>(quad.max_dim))
        throw std::invalid_argument("posterior_moments: n exceeds max_dim");

    const auto rule = gauss_hermite(quad.nodes_per_dim);
    const auto L = stationary_cholesky(n, params.rho, params.sigma2);
    const std::size_t q = rule.nodes.size();

    std::vector<double> log_gamma_y(n);
    for (std::size_t i = 0; i < n; ++i)
        log_gamma_y[i] = std::lgamma(static_cast<double>(data.y[i]) + 1.0);
    std::vector<double> log_w(q);
    for (std::size_t j = 0; j < q; ++j) log_w[j] = std::log(rule.weights[j]);

    // log-sum-exp accumulated online over the tensor grid
    double den_max = kNegInf, num_max = kNegInf;
    double den_sum = 0.0, num_sum = 0.0;
    auto accumulate = [](double& mx, double& sum, double lv) {
        if (lv == kNegInf) return;
        if (lv <= mx) {
            sum += std::exp(lv - mx);
        } else {
            sum = sum * std::exp(mx - lv) + 1.0;
            mx = lv;
        }
    };

    std::vector<std::size_t> idx(n, 0);
    std::vector<double> x(n);
    const double sqrt2 = std::sqrt(2.0);
    while (true) {
        double lw = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double xi = 0.0;
            for (std::size_t k = 0; k <= i; ++k)
                xi += L[i * n + k] * sqrt2 * rule.nodes[idx[k]];
            x[i] = xi;
            lw += log_w[idx[i]];
        }
        double x_max = kNegInf;
        for (std::size_t i = 0; i < n; ++i) {
            const double log_mean = params.alpha + x[i];
            lw += static_cast<double>(data.y[i]) * log_mean -
                  std::exp(log_mean) - log_gamma_y[i];
            x_max = std::max(x_max, x[i]);
        }
        double t_scaled = 0.0;
        for (std::size_t i = 0; i < n; ++i) t_scaled += std::exp(x[i] - x_max);
        const double log_t_arg = x_max + std::log(t_scaled);  // log t(x)
        accumulate(den_max, den_sum, lw);
        accumulate(num_max, num_sum, lw + log_t_arg);

        std::size_t d = 0;
        while (d < n && ++idx[d] == q) idx[d++] = 0;
        if (d == n) break;
    }

    if (den_max == kNegInf)
        throw std::runtime_error("posterior_moments: denominator underflow "
                                 "(all quadrature contributions vanished)");
    const double log_den = den_max + std::log(den_sum);
    const double log_num = num_max + std::log(num_sum);
    PosteriorMoments out;
    out.log_likelihood =
        log_den - 0.5 * static_cast<double>(n) * std::log(M_PI);
    out.posterior_mean_t = std::exp(log_num - log_den);
    return out;
}

double mean_field_oracle(double theta, const Dataset& data, double rho,
                         double sigma2, const QuadratureSpec& quad) {
    ModelParams params;
    params.alpha = zeta_hat(theta, data.y_bar());
    params.rho = rho;
    params.sigma2 = sigma2;
    return posterior_moments(data, params, quad).posterior_mean_t - theta;
}

}  // namespace pimhem
