#pragma once

#include <string>
#include <variant>
#include <vector>

namespace pimhem {

/// Deterministic power schedule: step size c * i^(-eta).
struct DeterministicPower {
    double c;
    double eta;  // must lie in (1/2, 1]
};

/// Bernoulli-gated random schedule: step size c_gamma * i^(-eta_gamma)
/// when a uniform draw passes the gate with probability
/// min(1, c_p * i^(-eta_p)), and zero otherwise.
struct BernoulliGated {
    double c_gamma;
    double eta_gamma;  // in (0, 1)
    double c_p;
    double eta_p;  // in (0, 1)

    double gamma_at(long i) const;
    /// Gate probability, clamped to [0, 1]. The experiment's constants give
    /// c_p * i^(-eta_p) > 1 for small i; those iterations always step.
    double gate_probability(long i) const;
};

class StepSizeSchedule {
public:
    explicit StepSizeSchedule(DeterministicPower p);
    explicit StepSizeSchedule(BernoulliGated p);

    /// Realized step size at iteration i >= 1. The uniform draw is consumed
    /// only by the Bernoulli gate; the deterministic schedule ignores it.
    double next(long i, double uniform_draw) const;

    bool is_random() const { return std::holds_alternative<BernoulliGated>(v_); }
    const BernoulliGated& gated() const { return std::get<BernoulliGated>(v_); }

private:
    std::variant<DeterministicPower, BernoulliGated> v_;
};

/// Outcome of checking a schedule against the stability inequalities.
struct ScheduleCheck {
    bool ok = true;
    /// Human-readable name of each violated inequality.
    std::vector<std::string> violations;
    /// Set when eta_gamma + eta_p == 1 exactly: the boundary case admitted
    /// by the weaker summability requirement but not the strict one.
    bool boundary_sum = false;
};

/// Checks eta_gamma + eta_p < 1, 2*eta_gamma + eta_p > 1 and
/// eta_gamma + 2*eta_p > 1.
ScheduleCheck validate_random_schedule(const BernoulliGated& s);

/// Exponents entering the stability margin.
struct ConditionExponents {
    double alpha_w = 0.0;
    double alpha_M = 0.0;
    double alpha_rho = 0.0;
    double alpha_H = 0.0;
    double alpha_V = 0.0;
    double beta_H = 0.0;  // in [0, 1/2]
};

struct MarginCheck {
    bool ok = false;
    double margin = 0.0;
};

/// margin = min(eta_gamma + 2*eta_p - 1, (2*eta_gamma + eta_p - 1)/2)
///          - (alpha_w + alpha_M + alpha_rho + alpha_H + beta_H * alpha_V).
/// ok iff margin > 0.
MarginCheck validate_exponent_margin(const ConditionExponents& e,
                                     const BernoulliGated& s);

}  // namespace pimhem
