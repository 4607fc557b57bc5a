#include "pimhem/projection.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace pimhem {

ProjectionSchedule::ProjectionSchedule(std::function<double(long)> lower,
                                       std::function<double(long)> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (!(lower_(0) > 0.0) || !(lower_(0) < upper_(0)))
        throw std::invalid_argument(
            "projection schedule: need 0 < lower(0) < upper(0)");
}

ProjectionSchedule ProjectionSchedule::canonical(double c_lower,
                                                 double eps_lower,
                                                 double c_upper1,
                                                 double c_upper2,
                                                 double eps_upper) {
    if (!(c_lower > 0.0 && c_upper1 > 0.0 && c_upper2 > 0.0))
        throw std::invalid_argument("projection schedule: constants must be positive");
    auto lower = [c_lower, eps_lower](long i) {
        return c_lower * std::pow(std::log(static_cast<double>(i) + 2.0),
                                  eps_lower - 1.0);
    };
    auto upper = [c_upper1, c_upper2, eps_upper](long i) {
        const double l = std::log(static_cast<double>(i) + 2.0);
        return c_upper1 *
               std::pow(static_cast<double>(i) + 2.0, c_upper2 / std::pow(l, eps_upper));
    };
    return ProjectionSchedule(lower, upper);
}

ProjectionSchedule ProjectionSchedule::fixed(double lo, double hi) {
    return ProjectionSchedule([lo](long) { return lo; }, [hi](long) { return hi; });
}

ProjectionResult project(const ProjectionSchedule& schedule,
                         ProjectionPolicy policy, long i, double theta_star,
                         double theta_prev) {
    const double lo = schedule.lower(i);
    const double hi = schedule.upper(i);
    if (theta_star >= lo && theta_star <= hi) return {theta_star, false};
    switch (policy) {
        case ProjectionPolicy::Clamp:
            return {std::min(std::max(theta_star, lo), hi), true};
        case ProjectionPolicy::RejectToPrevious:
            return {theta_prev, true};
    }
    throw std::logic_error("project: unknown policy");
}

}  // namespace pimhem
