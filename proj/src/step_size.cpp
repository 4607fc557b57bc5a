#include "pimhem/step_size.hpp"

#include <cmath>
#include <stdexcept>

namespace pimhem {

double BernoulliGated::gamma_at(long i) const {
    return c_gamma * std::pow(static_cast<double>(i), -eta_gamma);
}

double BernoulliGated::gate_probability(long i) const {
    double p = c_p * std::pow(static_cast<double>(i), -eta_p);
    return p > 1.0 ? 1.0 : p;
}

StepSizeSchedule::StepSizeSchedule(DeterministicPower p) : v_(p) {
    if (!(p.c > 0.0)) throw std::invalid_argument("step size: c must be positive");
    if (!(p.eta > 0.5 && p.eta <= 1.0))
        throw std::invalid_argument("step size: eta must lie in (1/2, 1]");
}

StepSizeSchedule::StepSizeSchedule(BernoulliGated p) : v_(p) {
    if (!(p.c_gamma > 0.0 && p.c_p > 0.0))
        throw std::invalid_argument("step size: c_gamma and c_p must be positive");
    if (!(p.eta_gamma > 0.0 && p.eta_gamma < 1.0 && p.eta_p > 0.0 && p.eta_p < 1.0))
        throw std::invalid_argument("step size: eta_gamma, eta_p must lie in (0, 1)");
}

double StepSizeSchedule::next(long i, double uniform_draw) const {
    if (i < 1) throw std::invalid_argument("step size: iteration index must be >= 1");
    if (const auto* d = std::get_if<DeterministicPower>(&v_)) {
        return d->c * std::pow(static_cast<double>(i), -d->eta);
    }
    const auto& g = std::get<BernoulliGated>(v_);
    return uniform_draw <= g.gate_probability(i) ? g.gamma_at(i) : 0.0;
}

ScheduleCheck validate_random_schedule(const BernoulliGated& s) {
    ScheduleCheck r;
    const double sum = s.eta_gamma + s.eta_p;
    if (!(sum < 1.0)) {
        r.ok = false;
        r.violations.push_back("eta_gamma + eta_p < 1");
        if (sum == 1.0) r.boundary_sum = true;
    }
    if (!(2.0 * s.eta_gamma + s.eta_p > 1.0)) {
        r.ok = false;
        r.violations.push_back("2*eta_gamma + eta_p > 1");
    }
    if (!(s.eta_gamma + 2.0 * s.eta_p > 1.0)) {
        r.ok = false;
        r.violations.push_back("eta_gamma + 2*eta_p > 1");
    }
    return r;
}

MarginCheck validate_exponent_margin(const ConditionExponents& e,
                                     const BernoulliGated& s) {
    const double slack = std::min(s.eta_gamma + 2.0 * s.eta_p - 1.0,
                                  (2.0 * s.eta_gamma + s.eta_p - 1.0) / 2.0);
    const double load =
        e.alpha_w + e.alpha_M + e.alpha_rho + e.alpha_H + e.beta_H * e.alpha_V;
    MarginCheck m;
    m.margin = slack - load;
    m.ok = m.margin > 0.0;
    return m;
}

}  // namespace pimhem
