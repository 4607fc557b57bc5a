#pragma once

#include <cstdint>
#include <memory>

#include "pimhem/poisson_ar1.hpp"
#include "pimhem/sa.hpp"
#include "pimhem/smc.hpp"

namespace pimhem {

/// PIMH-EM for the Poisson AR(1) model, exposed as a stochastic
/// approximation problem. The chain state is the retained particle filter
/// output; the update direction is the weighted sufficient statistic minus
/// the current iterate.
class PimhEmProblem final : public SaProblem {
public:
    /// alpha0 is the starting parameter value used for the initialization
    /// filter (theta_0 is the projected weighted sufficient statistic of
    /// that filter's output).
    PimhEmProblem(const Dataset& data, double alpha0, std::size_t n_particles,
                  double rho, double sigma2, PimhOptions pimh_opts = {});

    void seed(std::uint64_t root_seed) override;
    double initial_theta() override;
    double advance(double theta) override;
    bool last_accepted() const override { return last_accepted_; }
    double derived_parameter(double theta) const override;

    const PimhState& state() const { return state_; }

private:
    double weighted_sufficient_stat() const;

    const Dataset* data_;
    double alpha0_;
    std::size_t n_particles_;
    PoissonAr1Model model_;
    PimhOptions pimh_opts_;
    PimhState state_;
    std::unique_ptr<RngStream> pf_rng_;
    std::unique_ptr<RngStream> accept_rng_;
    bool last_accepted_ = false;
    double y_bar_;
};

}  // namespace pimhem
