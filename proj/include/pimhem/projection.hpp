#pragma once

#include <functional>

namespace pimhem {

enum class ProjectionPolicy {
    Clamp,             // theta^proj = (lower v theta*) ^ upper
    RejectToPrevious,  // theta^proj = theta_{i-1}
};

/// Expanding interval family R_i = [lower(i), upper(i)] with lower
/// non-increasing and upper non-decreasing in i.
class ProjectionSchedule {
public:
    ProjectionSchedule(std::function<double(long)> lower,
                       std::function<double(long)> upper);

    /// The canonical family
    ///   lower(i) = c_lower * log(i+2)^(eps_lower - 1)
    ///   upper(i) = c_upper1 * (i+2)^(c_upper2 / log(i+2)^eps_upper)
    static ProjectionSchedule canonical(double c_lower, double eps_lower,
                                        double c_upper1, double c_upper2,
                                        double eps_upper);

    /// A fixed interval [lo, hi] for all i.
    static ProjectionSchedule fixed(double lo, double hi);

    double lower(long i) const { return lower_(i); }
    double upper(long i) const { return upper_(i); }

private:
    std::function<double(long)> lower_;
    std::function<double(long)> upper_;
};

struct ProjectionResult {
    double theta;
    bool projected;
};

/// Projects theta_star into R_i. theta_prev must already lie in R_i
/// (it was in R_{i-1}, and the sets expand).
ProjectionResult project(const ProjectionSchedule& schedule,
                         ProjectionPolicy policy, long i, double theta_star,
                         double theta_prev);

}  // namespace pimhem
