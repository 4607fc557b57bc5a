#include "pimhem/pimh_em.hpp"

#include <stdexcept>

namespace pimhem {

PimhEmProblem::PimhEmProblem(const Dataset& data, double alpha0,
                             std::size_t n_particles, double rho,
                             double sigma2, PimhOptions pimh_opts)
    : data_(&data),
      alpha0_(alpha0),
      n_particles_(n_particles),
      model_(data, ModelParams{alpha0, rho, sigma2}),
      pimh_opts_(pimh_opts),
      y_bar_(data.y_bar()) {
    if (n_particles < 2)
        throw std::invalid_argument("pimh-em: need at least 2 particles");
    if (!(y_bar_ > 0.0))
        throw std::invalid_argument(
            "pimh-em: all-zero observations, alpha_hat undefined");
}

void PimhEmProblem::seed(std::uint64_t root_seed) {
    RngStream root(root_seed);
    pf_rng_ = std::make_unique<RngStream>(root.substream("particle-filter"));
    accept_rng_ = std::make_unique<RngStream>(root.substream("pimh-accept"));
}

double PimhEmProblem::weighted_sufficient_stat() const {
    return weighted_statistic(state_.current, [](const std::vector<double>& x) {
        return sufficient_stat(x);
    });
}

double PimhEmProblem::initial_theta() {
    if (!pf_rng_) throw std::logic_error("pimh-em: seed() not called");
    model_.set_alpha(alpha0_);
    state_.current = run_particle_filter(model_, n_particles_, *pf_rng_);
    last_accepted_ = true;
    return weighted_sufficient_stat();
}

double PimhEmProblem::advance(double theta) {
    model_.set_alpha(zeta_hat(theta, y_bar_));
    last_accepted_ =
        pimh_step(state_, model_, n_particles_, *pf_rng_, *accept_rng_,
                  pimh_opts_);
    return weighted_sufficient_stat() - theta;
}

double PimhEmProblem::derived_parameter(double theta) const {
    return zeta_hat(theta, y_bar_);
}

}  // namespace pimhem
