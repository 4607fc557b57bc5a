#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pimhem/rng.hpp"
#include "pimhem/smc.hpp"

namespace pimhem {

/// Poisson counts driven by a latent stationary AR(1) intensity:
/// X_1 ~ N(0, sigma2/(1-rho^2)), X_k = rho X_{k-1} + sigma eps_k,
/// Y_k | X_k ~ Poisson(exp(alpha + X_k)). alpha is the free parameter.
struct ModelParams {
    double alpha = 0.0;
    double rho = 0.0;     // fixed, |rho| < 1
    double sigma2 = 1.0;  // fixed, > 0

    double stationary_variance() const { return sigma2 / (1.0 - rho * rho); }
    void validate() const;
};

struct Dataset {
    std::vector<long> y;
    std::optional<std::vector<double>> true_x;  // kept when simulated
    // header metadata, present when the file was written by `simulate`
    std::optional<double> alpha_true;
    std::optional<double> rho;
    std::optional<double> sigma2;
    std::optional<std::uint64_t> seed;

    std::size_t n() const { return y.size(); }
    double y_bar() const;
    void validate() const;
};

Dataset simulate(const ModelParams& params, std::size_t n, RngStream& rng);

/// Dataset file format: '#'-prefixed header lines, then one count per line.
void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in);
Dataset read_dataset_file(const std::string& path);

/// Complete-data log-likelihood L(x, zeta) up to an additive constant in x.
/// For n = 1 the quadratic form reduces to the stationary prior term
/// (1 - rho^2) x^2 / (2 sigma^2).
double complete_loglik(const std::vector<double>& x, const Dataset& data,
                       const ModelParams& params);

/// Sufficient statistic t(x) = sum_i exp(x_i); switches to log-domain
/// accumulation when max x_i > 30 and throws on overflow.
double sufficient_stat(const std::vector<double>& x);

/// The complete-data maximiser alpha_hat(theta) = log(y_bar / theta).
double zeta_hat(double theta, double y_bar);

/// Jensen lower bound on the log-likelihood:
/// -sum log(y_i!) + y_bar*alpha - n*exp(alpha + sigma2/(2(1-rho^2))).
double likelihood_lower_bound(const Dataset& data, const ModelParams& params);

/// Lower bound on inf dq^PF / dpi^PIMH at parameter alpha_hat(theta):
/// c1 * exp(y_bar * alpha_hat - c2 * exp(alpha_hat)) with
/// c1 = exp(-sum log y_i!) and c2 = n * exp(sigma2/(2(1-rho^2))).
double pimh_epsilon_lower_bound(double theta, const Dataset& data, double rho,
                                double sigma2);

/// Drift function V = sum over all stored particles of exp(2|x|).
double drift_V(const PfOutput& pf);

/// Closed-form bound q(V) <= 2 n N^n exp(2 sigma2 / (1 - rho^2)).
double qV_upper_bound(std::size_t n, std::size_t N, double rho, double sigma2);

/// Prior expectation of the sufficient statistic:
/// m_theta = n * exp(sigma2 / (2 (1 - rho^2))).
double m_theta(std::size_t n, double rho, double sigma2);

/// Log Poisson pmf with mean exp(log_mean), stable for large means.
double poisson_log_pmf(long y, double log_mean);

/// StateSpaceModel adapter: prior-proposal bootstrap filter for this model.
/// The artificial unobserved initial state X_0 is sampled and propagated
/// once before t = 1.
class PoissonAr1Model final : public StateSpaceModel {
public:
    PoissonAr1Model(const Dataset& data, ModelParams params);

    std::size_t length() const override { return data_->n(); }
    double sample_initial(RngStream& rng) const override;
    double sample_transition(double x_prev, RngStream& rng) const override;
    double log_weight(double x, std::size_t t) const override;

    const ModelParams& params() const { return params_; }
    void set_alpha(double alpha) { params_.alpha = alpha; }

private:
    const Dataset* data_;
    ModelParams params_;
    std::vector<double> log_y_factorial_;
};

}  // namespace pimhem
