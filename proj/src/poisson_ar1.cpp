#include "pimhem/poisson_ar1.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pimhem {

void ModelParams::validate() const {
    if (!(std::abs(rho) < 1.0))
        throw std::invalid_argument("model: |rho| must be < 1");
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("model: sigma2 must be > 0");
    if (!std::isfinite(alpha))
        throw std::invalid_argument("model: alpha must be finite");
}

double Dataset::y_bar() const {
    double s = 0.0;
    for (long v : y) s += static_cast<double>(v);
    return s;
}

void Dataset::validate() const {
    if (y.empty()) throw std::invalid_argument("dataset: n must be >= 1");
    for (long v : y)
        if (v < 0) throw std::invalid_argument("dataset: counts must be >= 0");
}

Dataset simulate(const ModelParams& params, std::size_t n, RngStream& rng) {
    params.validate();
    if (n < 1) throw std::invalid_argument("simulate: n must be >= 1");
    const double sd_stat = std::sqrt(params.stationary_variance());
    const double sd = std::sqrt(params.sigma2);

    Dataset data;
    data.y.resize(n);
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) {
        x[k] = (k == 0) ? sd_stat * rng.normal()
                        : params.rho * x[k - 1] + sd * rng.normal();
        const double log_mean = params.alpha + x[k];
        if (log_mean > 700.0)
            throw std::runtime_error("simulate: intensity overflow");
        data.y[k] = rng.poisson(std::exp(log_mean));
    }
    data.true_x = std::move(x);
    data.alpha_true = params.alpha;
    data.rho = params.rho;
    data.sigma2 = params.sigma2;
    return data;
}

void write_dataset(std::ostream& out, const Dataset& data) {
    out << "# n=" << data.n();
    if (data.alpha_true) out << " alpha_true=" << *data.alpha_true;
    if (data.rho) out << " rho=" << *data.rho;
    if (data.sigma2) out << " sigma2=" << *data.sigma2;
    if (data.seed) out << " seed=" << *data.seed;
    out << '\n';
    for (long v : data.y) out << v << '\n';
}

Dataset read_dataset(std::istream& in) {
    Dataset data;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string tok;
            while (ss >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = tok.substr(0, eq);
                const std::string val = tok.substr(eq + 1);
                if (key == "alpha_true") data.alpha_true = std::stod(val);
                else if (key == "rho") data.rho = std::stod(val);
                else if (key == "sigma2") data.sigma2 = std::stod(val);
                else if (key == "seed") data.seed = std::stoull(val);
            }
            continue;
        }
        data.y.push_back(std::stol(line));
    }
    data.validate();
    return data;
}

Dataset read_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    return read_dataset(in);
}

double complete_loglik(const std::vector<double>& x, const Dataset& data,
                       const ModelParams& params) {
    params.validate();
    const std::size_t n = data.n();
    if (x.size() != n)
        throw std::invalid_argument("complete_loglik: x length mismatch");

    double obs = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        obs += static_cast<double>(data.y[i]) * (params.alpha + x[i]) -
               std::exp(params.alpha + x[i]);

    double quad;
    if (n == 1) {
        // Stationary prior term; the generic form would double-count x_1^2.
        quad = (1.0 - params.rho * params.rho) * x[0] * x[0];
    } else {
        quad = x[0] * x[0] + x[n - 1] * x[n - 1];
        for (std::size_t i = 1; i + 1 < n; ++i)
            quad += (1.0 + params.rho * params.rho) * x[i] * x[i];
        for (std::size_t i = 1; i < n; ++i)
            quad -= 2.0 * params.rho * x[i] * x[i - 1];
    }
    return obs - quad / (2.0 * params.sigma2);
}

double sufficient_stat(const std::vector<double>& x) {
    if (x.empty()) throw std::invalid_argument("sufficient_stat: empty input");
    double m = -std::numeric_limits<double>::infinity();
    for (double v : x) {
        if (!std::isfinite(v))
            throw std::invalid_argument("sufficient_stat: non-finite entry");
        m = std::max(m, v);
    }
    if (m <= 30.0) {
        double s = 0.0;
        for (double v : x) s += std::exp(v);
        return s;
    }
    double s = 0.0;
    for (double v : x) s += std::exp(v - m);
    const double log_t = m + std::log(s);
    if (log_t > 700.0)
        throw std::runtime_error("sufficient_stat: overflow");
    return std::exp(log_t);
}

double zeta_hat(double theta, double y_bar) {
    if (!(theta > 0.0))
        throw std::invalid_argument("zeta_hat: theta must be > 0");
    if (!(y_bar > 0.0))
        throw std::invalid_argument("zeta_hat: y_bar must be > 0");
    return std::log(y_bar / theta);
}

double likelihood_lower_bound(const Dataset& data, const ModelParams& params) {
    params.validate();
    double log_fact = 0.0;
    for (long v : data.y) log_fact += std::lgamma(static_cast<double>(v) + 1.0);
    const double n = static_cast<double>(data.n());
    return -log_fact + data.y_bar() * params.alpha -
           n * std::exp(params.alpha + params.stationary_variance() / 2.0);
}

double pimh_epsilon_lower_bound(double theta, const Dataset& data, double rho,
                                double sigma2) {
    const double alpha_hat = zeta_hat(theta, data.y_bar());
    double log_fact = 0.0;
    for (long v : data.y) log_fact += std::lgamma(static_cast<double>(v) + 1.0);
    const double sigma_z2 = sigma2 / (1.0 - rho * rho);
    const double c2 = static_cast<double>(data.n()) * std::exp(sigma_z2 / 2.0);
    return std::exp(-log_fact + data.y_bar() * alpha_hat -
                    c2 * std::exp(alpha_hat));
}

double drift_V(const PfOutput& pf) {
    double s = 0.0;
    for (std::size_t i = 0; i < pf.particles.size(); ++i) {
        const double e = 2.0 * std::abs(pf.particles[i]);
        if (e > 700.0)
            throw std::runtime_error("drift_V: overflow at particle entry " +
                                     std::to_string(i));
        s += std::exp(e);
    }
    return s;
}

double qV_upper_bound(std::size_t n, std::size_t N, double rho, double sigma2) {
    return 2.0 * static_cast<double>(n) *
           std::pow(static_cast<double>(N), static_cast<double>(n)) *
           std::exp(2.0 * sigma2 / (1.0 - rho * rho));
}

double m_theta(std::size_t n, double rho, double sigma2) {
    if (n < 1 || !(std::abs(rho) < 1.0) || !(sigma2 > 0.0))
        throw std::invalid_argument("m_theta: bad parameters");
    return static_cast<double>(n) * std::exp(sigma2 / (2.0 * (1.0 - rho * rho)));
}

double poisson_log_pmf(long y, double log_mean) {
    return static_cast<double>(y) * log_mean - std::exp(log_mean) -
           std::lgamma(static_cast<double>(y) + 1.0);
}

PoissonAr1Model::PoissonAr1Model(const Dataset& data, ModelParams params)
    : data_(&data), params_(params) {
    data.validate();
    params.validate();
    log_y_factorial_.reserve(data.n());
    for (long v : data.y)
        log_y_factorial_.push_back(std::lgamma(static_cast<double>(v) + 1.0));
}

double PoissonAr1Model::sample_initial(RngStream& rng) const {
    // Artificial X_0 from the stationary law, then one transition to X_1.
    const double x0 = std::sqrt(params_.stationary_variance()) * rng.normal();
    return sample_transition(x0, rng);
}

double PoissonAr1Model::sample_transition(double x_prev, RngStream& rng) const {
    return params_.rho * x_prev + std::sqrt(params_.sigma2) * rng.normal();
}

double PoissonAr1Model::log_weight(double x, std::size_t t) const {
    const long y = data_->y[t - 1];
    const double log_mean = params_.alpha + x;
    return static_cast<double>(y) * log_mean - std::exp(log_mean) -
           log_y_factorial_[t - 1];
}

}  // namespace pimhem
