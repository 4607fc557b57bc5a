#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pimhem {

/// One row of the run trace.
struct TraceRecord {
    long iteration = 0;
    double theta = 0.0;
    double derived_parameter = 0.0;  // alpha_hat(theta) for the application
    double gamma = 0.0;
    bool accepted = false;
    bool projected = false;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
};

inline constexpr const char* kTraceCsvHeader =
    "iter,theta,alpha_hat,gamma,accepted,projected,lower,upper";

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> read_trace_csv(std::istream& in);

struct RunSummary {
    double final_theta = 0.0;
    double final_alpha_hat = 0.0;
    long n_projections = 0;
    double acceptance_rate = 0.0;
    long n_iterations = 0;
    std::uint64_t seed = 0;
};

/// Serializes the summary as a JSON object with fixed keys.
std::string summary_to_json(const RunSummary& s);

}  // namespace pimhem
