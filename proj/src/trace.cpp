#include "pimhem/trace.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace pimhem {

namespace {

std::string fmt_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace) {
    out << kTraceCsvHeader << '\n';
    for (const auto& r : trace) {
        out << r.iteration << ',' << fmt_double(r.theta) << ','
            << fmt_double(r.derived_parameter) << ',' << fmt_double(r.gamma)
            << ',' << (r.accepted ? 1 : 0) << ',' << (r.projected ? 1 : 0)
            << ',' << fmt_double(r.lower_bound) << ','
            << fmt_double(r.upper_bound) << '\n';
    }
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
    std::vector<TraceRecord> out;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("trace csv: empty input");
    if (line != kTraceCsvHeader)
        throw std::runtime_error("trace csv: unexpected header: " + line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        TraceRecord r;
        auto next = [&]() -> std::string {
            if (!std::getline(ss, field, ','))
                throw std::runtime_error("trace csv: short row: " + line);
            return field;
        };
        r.iteration = std::stol(next());
        r.theta = std::stod(next());
        r.derived_parameter = std::stod(next());
        r.gamma = std::stod(next());
        r.accepted = std::stoi(next()) != 0;
        r.projected = std::stoi(next()) != 0;
        r.lower_bound = std::stod(next());
        r.upper_bound = std::stod(next());
        out.push_back(r);
    }
    return out;
}

std::string summary_to_json(const RunSummary& s) {
    nlohmann::json j;
    j["final_theta"] = s.final_theta;
    j["final_alpha_hat"] = s.final_alpha_hat;
    j["n_projections"] = s.n_projections;
    j["acceptance_rate"] = s.acceptance_rate;
    j["n_iterations"] = s.n_iterations;
    j["seed"] = s.seed;
    return j.dump(2);
}

}  // namespace pimhem
