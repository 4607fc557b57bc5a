// Command-line front end: dataset simulation, PIMH-EM runs, schedule
// validation, ergodicity bound calculators and the quadrature oracle.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pimhem/ergodicity.hpp"
#include "pimhem/pimh_em.hpp"
#include "pimhem/poisson_ar1.hpp"
#include "pimhem/quadrature.hpp"
#include "pimhem/sa.hpp"
#include "pimhem/step_size.hpp"
#include "pimhem/trace.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct RunConfig {
    std::string dataset;
    long n_iterations = 10000;
    std::size_t n_particles = 1000;
    std::uint64_t seed = 1;
    double alpha0 = 2.0;
    double rho = 0.4;
    double sigma2 = 1.0;
    // schedule
    std::string schedule_kind = "bernoulli";
    double c_gamma = 6.0;
    double eta_gamma = 0.35;
    double c_p = 3.0;
    double eta_p = 0.35;
    // projection; negative c_lower/c_upper1 mean "derive from m_theta"
    double c_lower = -1.0;
    double eps_lower = 0.1;
    double c_upper1 = -1.0;
    double c_upper2 = 1.0;
    double eps_upper = 0.1;
    std::string policy = "clamp";
    long trace_every = 1;
    bool recompute_on_compare = false;
};

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: expected key=value, got: " + line);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv,
                  const std::map<std::string, bool>& flag_given) {
    auto want = [&](const std::string& key) {
        auto it = flag_given.find(key);
        return kv.count(key) && (it == flag_given.end() || !it->second);
    };
    auto d = [&](const std::string& key, double& out) {
        if (want(key)) out = std::stod(kv.at(key));
    };
    auto l = [&](const std::string& key, long& out) {
        if (want(key)) out = std::stol(kv.at(key));
    };
    auto s = [&](const std::string& key, std::string& out) {
        if (want(key)) out = kv.at(key);
    };
    if (want("seed")) cfg.seed = std::stoull(kv.at("seed"));
    if (want("n_particles")) cfg.n_particles = std::stoul(kv.at("n_particles"));
    l("n_iterations", cfg.n_iterations);
    l("trace_every", cfg.trace_every);
    s("dataset", cfg.dataset);
    d("alpha0", cfg.alpha0);
    d("rho", cfg.rho);
    d("sigma2", cfg.sigma2);
    s("schedule.kind", cfg.schedule_kind);
    d("schedule.c_gamma", cfg.c_gamma);
    d("schedule.eta_gamma", cfg.eta_gamma);
    d("schedule.c_p", cfg.c_p);
    d("schedule.eta_p", cfg.eta_p);
    d("projection.c_lower", cfg.c_lower);
    d("projection.eps_lower", cfg.eps_lower);
    d("projection.c_upper1", cfg.c_upper1);
    d("projection.c_upper2", cfg.c_upper2);
    d("projection.eps_upper", cfg.eps_upper);
    s("policy", cfg.policy);
}

pimhem::StepSizeSchedule make_schedule(const RunConfig& cfg) {
    if (cfg.schedule_kind == "bernoulli") {
        pimhem::BernoulliGated g{cfg.c_gamma, cfg.eta_gamma, cfg.c_p, cfg.eta_p};
        const auto check = pimhem::validate_random_schedule(g);
        if (!check.ok) {
            std::string msg = "schedule violates stability inequalities:";
            for (const auto& v : check.violations) msg += " " + v + ";";
            throw std::invalid_argument(msg);
        }
        return pimhem::StepSizeSchedule(g);
    }
    if (cfg.schedule_kind == "deterministic")
        return pimhem::StepSizeSchedule(
            pimhem::DeterministicPower{cfg.c_gamma, cfg.eta_gamma});
    throw std::invalid_argument("unknown schedule kind: " + cfg.schedule_kind);
}

pimhem::SaConfig make_sa_config(const RunConfig& cfg, double m_theta_val) {
    const double c_lower = cfg.c_lower > 0 ? cfg.c_lower : 0.1 * m_theta_val;
    const double c_upper1 = cfg.c_upper1 > 0 ? cfg.c_upper1 : 10.0 * m_theta_val;
    pimhem::SaConfig sa{
        cfg.n_iterations, make_schedule(cfg),
        pimhem::ProjectionSchedule::canonical(c_lower, cfg.eps_lower, c_upper1,
                                              cfg.c_upper2, cfg.eps_upper),
        cfg.policy == "reject" ? pimhem::ProjectionPolicy::RejectToPrevious
                               : pimhem::ProjectionPolicy::Clamp,
        cfg.trace_every};
    return sa;
}

int cmd_simulate(std::size_t n, double alpha, double rho, double sigma2,
                 std::uint64_t seed, const std::string& out_path) {
    pimhem::ModelParams params{alpha, rho, sigma2};
    pimhem::RngStream rng = pimhem::RngStream(seed).substream("simulate");
    pimhem::Dataset data = pimhem::simulate(params, n, rng);
    data.seed = seed;
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write dataset file: " + out_path);
    pimhem::write_dataset(out, data);
    std::cout << "y_bar " << data.y_bar() << "\n"
              << "m_theta " << pimhem::m_theta(n, rho, sigma2) << "\n";
    return kExitOk;
}

pimhem::RunSummary run_once(const RunConfig& cfg, const pimhem::Dataset& data,
                            std::uint64_t seed,
                            std::vector<pimhem::TraceRecord>* trace_out) {
    const double mt = pimhem::m_theta(data.n(), cfg.rho, cfg.sigma2);
    const auto sa = make_sa_config(cfg, mt);
    pimhem::PimhEmProblem problem(data, cfg.alpha0, cfg.n_particles, cfg.rho,
                                  cfg.sigma2,
                                  pimhem::PimhOptions{cfg.recompute_on_compare});
    auto result = pimhem::run(sa, problem, seed);
    if (trace_out) *trace_out = std::move(result.trace);
    return result.summary;
}

int cmd_run(const RunConfig& cfg, const std::string& trace_path,
            int replicates) {
    pimhem::Dataset data = pimhem::read_dataset_file(cfg.dataset);
    if (replicates <= 1) {
        std::vector<pimhem::TraceRecord> trace;
        const auto summary = run_once(cfg, data, cfg.seed, &trace);
        if (!trace_path.empty()) {
            std::ofstream out(trace_path);
            if (!out)
                throw std::runtime_error("cannot write trace file: " + trace_path);
            pimhem::write_trace_csv(out, trace);
        }
        std::cout << pimhem::summary_to_json(summary) << "\n";
        return kExitOk;
    }
    // Independent replicate runs with derived seeds; summaries only.
    std::vector<pimhem::RunSummary> summaries(replicates);
    std::vector<std::thread> workers;
    std::vector<std::string> errors(replicates);
    pimhem::RngStream root(cfg.seed);
    for (int r = 0; r < replicates; ++r) {
        const std::uint64_t rep_seed =
            pimhem::RngStream(cfg.seed).substream("replicate", r).next_u64();
        workers.emplace_back([&, r, rep_seed]() {
            try {
                summaries[r] = run_once(cfg, data, rep_seed, nullptr);
            } catch (const std::exception& e) {
                errors[r] = e.what();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error("replicate failed: " + e);
    json merged = json::array();
    for (const auto& s : summaries) merged.push_back(json::parse(pimhem::summary_to_json(s)));
    std::cout << merged.dump(2) << "\n";
    return kExitOk;
}

int cmd_validate(const RunConfig& cfg, const pimhem::ConditionExponents& ex) {
    if (cfg.schedule_kind != "bernoulli") {
        std::cout << "deterministic schedule: eta in (1/2, 1] checked at "
                     "construction\n";
        make_schedule(cfg);
        return kExitOk;
    }
    pimhem::BernoulliGated g{cfg.c_gamma, cfg.eta_gamma, cfg.c_p, cfg.eta_p};
    const auto check = pimhem::validate_random_schedule(g);
    if (!check.ok) {
        std::cout << "schedule: FAIL\n";
        for (const auto& v : check.violations)
            std::cout << "  violated: " << v << "\n";
        if (check.boundary_sum)
            std::cout << "  note: eta_gamma + eta_p = 1 exactly (boundary case)\n";
        return kExitValidation;
    }
    const auto margin = pimhem::validate_exponent_margin(ex, g);
    std::cout << "schedule: ok\n"
              << "exponent margin: " << margin.margin
              << (margin.ok ? " (ok)" : " (FAIL)") << "\n";
    return margin.ok ? kExitOk : kExitValidation;
}

int cmd_bounds(bool have_drift, double lambda, double b, double delta,
               double v, double r, bool tight_rate, bool have_imh,
               double epsilon, double qv, double zeta) {
    json out;
    if (have_drift) {
        pimhem::DriftMinorisation dm{lambda, b, delta, v};
        const auto bound =
            pimhem::meyn_tweedie_constants(dm, r, pimhem::MeynTweedieOptions{tight_rate});
        out["M"] = bound.multiplier;
        out["rate"] = bound.rate;
    } else if (have_imh) {
        const auto drift = pimhem::imh_drift(epsilon, qv);
        const auto bound = pimhem::imh_geometric_constants(epsilon, qv, zeta);
        out["M"] = pimhem::imh_bound_M(epsilon, qv);
        out["M_prime"] = bound.multiplier;
        out["rate"] = bound.rate;
        out["drift_rho"] = drift.rho;
        out["drift_b"] = drift.b;
    } else {
        throw std::invalid_argument(
            "bounds: supply either --lambda/--b/--delta/--v or "
            "--epsilon/--qv/--zeta");
    }
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_verify_imh(const std::string& chain_path, double zeta, int k_max) {
    std::ifstream in(chain_path);
    if (!in) throw std::runtime_error("cannot open chain file: " + chain_path);
    std::size_t S = 0;
    in >> S;
    if (S == 0) throw std::runtime_error("chain file: bad state count");
    auto read_row = [&](std::vector<double>& row) {
        row.resize(S);
        for (auto& x : row)
            if (!(in >> x)) throw std::runtime_error("chain file: short row");
    };
    pimhem::FiniteImhChain chain;
    std::vector<double> f;
    read_row(chain.target);
    read_row(chain.proposal);
    read_row(chain.V);
    read_row(f);
    const auto rep = pimhem::verify_bound_on_finite_chain(chain, f, zeta, k_max);
    json out;
    out["epsilon"] = rep.epsilon;
    out["max_ratio_linear"] = rep.max_ratio_linear;
    out["max_ratio_geometric"] = rep.max_ratio_geometric;
    out["ok"] = rep.max_ratio_linear <= 1.0 && rep.max_ratio_geometric <= 1.0;
    std::cout << out.dump(2) << "\n";
    return out["ok"].get<bool>() ? kExitOk : kExitValidation;
}

int cmd_oracle(const std::string& dataset_path, double min_mult,
               double max_mult, int points, int order, double rho,
               double sigma2) {
    pimhem::Dataset data = pimhem::read_dataset_file(dataset_path);
    if (data.rho) rho = *data.rho;
    if (data.sigma2) sigma2 = *data.sigma2;
    if (data.n() > 3)
        throw std::invalid_argument("oracle: quadrature limited to n <= 3");
    const double mt = pimhem::m_theta(data.n(), rho, sigma2);
    pimhem::QuadratureSpec quad{order, 3};
    std::cout << "theta,h\n";
    for (int i = 0; i < points; ++i) {
        const double frac = points == 1 ? 0.0
                                        : static_cast<double>(i) / (points - 1);
        const double theta =
            mt * std::exp(std::log(min_mult) +
                          frac * (std::log(max_mult) - std::log(min_mult)));
        const double h =
            pimhem::mean_field_oracle(theta, data, rho, sigma2, quad);
        std::cout << theta << "," << h << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic approximation with expanding projections: "
                 "PIMH-EM for the Poisson AR(1) count model"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a dataset");
    std::size_t sim_n = 100;
    double sim_alpha = 2.0, sim_rho = 0.4, sim_sigma2 = 1.0;
    std::uint64_t sim_seed = 1;
    std::string sim_out = "dataset.txt";
    sim->add_option("--n", sim_n, "Number of observations")->check(CLI::PositiveNumber);
    sim->add_option("--alpha", sim_alpha, "True alpha");
    sim->add_option("--rho", sim_rho, "AR(1) coefficient");
    sim->add_option("--sigma2", sim_sigma2, "Innovation variance");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--out", sim_out, "Output dataset path");

    // run
    auto* runc = app.add_subcommand("run", "Run PIMH-EM on a dataset");
    RunConfig cfg;
    std::string config_path, trace_path;
    int replicates = 1;
    auto* o_dataset = runc->add_option("--dataset", cfg.dataset, "Dataset file");
    auto* o_iters = runc->add_option("--n-iterations", cfg.n_iterations,
                                     "Post-init iterations");
    auto* o_particles =
        runc->add_option("--particles", cfg.n_particles, "Particles N");
    auto* o_seed = runc->add_option("--seed", cfg.seed, "RNG seed");
    auto* o_alpha0 = runc->add_option("--alpha0", cfg.alpha0, "Initial alpha_hat");
    auto* o_rho = runc->add_option("--rho", cfg.rho, "AR(1) coefficient");
    auto* o_sigma2 = runc->add_option("--sigma2", cfg.sigma2, "Innovation variance");
    auto* o_kind = runc->add_option("--schedule-kind", cfg.schedule_kind,
                                    "bernoulli | deterministic");
    auto* o_cg = runc->add_option("--c-gamma", cfg.c_gamma, "Step size scale");
    auto* o_eg = runc->add_option("--eta-gamma", cfg.eta_gamma, "Step size decay");
    auto* o_cp = runc->add_option("--c-p", cfg.c_p, "Gate probability scale");
    auto* o_ep = runc->add_option("--eta-p", cfg.eta_p, "Gate probability decay");
    auto* o_cl = runc->add_option("--c-lower", cfg.c_lower,
                                  "Lower projection scale (default 0.1*m_theta)");
    auto* o_el = runc->add_option("--eps-lower", cfg.eps_lower, "Lower exponent");
    auto* o_cu1 = runc->add_option("--c-upper1", cfg.c_upper1,
                                   "Upper projection scale (default 10*m_theta)");
    auto* o_cu2 = runc->add_option("--c-upper2", cfg.c_upper2, "Upper exponent scale");
    auto* o_eu = runc->add_option("--eps-upper", cfg.eps_upper, "Upper exponent");
    auto* o_policy = runc->add_option("--policy", cfg.policy, "clamp | reject");
    auto* o_thin = runc->add_option("--trace-every", cfg.trace_every,
                                    "Trace thinning interval");
    runc->add_flag("--recompute-on-compare", cfg.recompute_on_compare,
                   "Re-evaluate retained Zhat at current parameters");
    runc->add_option("--config", config_path, "Flat key=value config file");
    runc->add_option("--trace", trace_path, "Trace CSV output path");
    runc->add_option("--replicates", replicates, "Parallel independent runs");

    // validate
    auto* val = app.add_subcommand("validate", "Check schedule conditions");
    RunConfig vcfg;
    pimhem::ConditionExponents ex;
    std::string vconfig_path;
    val->add_option("--eta-gamma", vcfg.eta_gamma, "Step size decay");
    val->add_option("--eta-p", vcfg.eta_p, "Gate probability decay");
    val->add_option("--c-gamma", vcfg.c_gamma, "Step size scale");
    val->add_option("--c-p", vcfg.c_p, "Gate probability scale");
    val->add_option("--schedule-kind", vcfg.schedule_kind, "bernoulli | deterministic");
    val->add_option("--alpha-w", ex.alpha_w, "Lyapunov gradient exponent");
    val->add_option("--alpha-m", ex.alpha_M, "Ergodicity multiplier exponent");
    val->add_option("--alpha-rho", ex.alpha_rho, "Ergodicity rate exponent");
    val->add_option("--alpha-h", ex.alpha_H, "Update norm exponent");
    val->add_option("--alpha-v", ex.alpha_V, "Drift expectation exponent");
    val->add_option("--beta-h", ex.beta_H, "Update norm power");
    val->add_option("--config", vconfig_path, "Flat key=value config file");

    // bounds
    auto* bnd = app.add_subcommand("bounds", "Ergodicity constant calculators");
    double b_lambda = 0, b_b = 0, b_delta = 0, b_v = 1, b_r = 1;
    double b_eps = 0, b_qv = 0, b_zeta = 0;
    bool tight_rate = false;
    auto* ob_l = bnd->add_option("--lambda", b_lambda, "Drift rate");
    auto* ob_b = bnd->add_option("--b", b_b, "Drift constant");
    auto* ob_d = bnd->add_option("--delta", b_delta, "Minorisation constant");
    bnd->add_option("--v", b_v, "sup of V on the small set");
    bnd->add_option("--r", b_r, "Norm power in (0, 1]");
    bnd->add_flag("--tight-rate", tight_rate, "Sharper rate bracket (r = 1)");
    auto* ob_e = bnd->add_option("--epsilon", b_eps, "IMH proposal/target lower bound");
    auto* ob_q = bnd->add_option("--qv", b_qv, "q(V)");
    auto* ob_z = bnd->add_option("--zeta", b_zeta, "Geometric form parameter");

    // verify-imh
    auto* vimh = app.add_subcommand("verify-imh",
                                    "Verify IMH bounds on a finite chain");
    std::string chain_path;
    double vz = 0.5;
    int k_max = 200;
    vimh->add_option("--chain", chain_path, "Chain description file")->required();
    vimh->add_option("--zeta", vz, "Geometric form parameter");
    vimh->add_option("--k-max", k_max, "Number of matrix powers");

    // oracle
    auto* orc = app.add_subcommand("oracle", "Quadrature mean-field h(theta)");
    std::string orc_dataset;
    double orc_min = 1e-3, orc_max = 1e3, orc_rho = 0.4, orc_sigma2 = 1.0;
    int orc_points = 25, orc_order = 40;
    orc->add_option("--dataset", orc_dataset, "Dataset file (n <= 3)")->required();
    orc->add_option("--min-mult", orc_min, "Grid start as multiple of m_theta");
    orc->add_option("--max-mult", orc_max, "Grid end as multiple of m_theta");
    orc->add_option("--points", orc_points, "Grid size");
    orc->add_option("--order", orc_order, "Quadrature nodes per dimension");
    orc->add_option("--rho", orc_rho, "AR(1) coefficient (dataset header wins)");
    orc->add_option("--sigma2", orc_sigma2, "Innovation variance (dataset header wins)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim)
            return cmd_simulate(sim_n, sim_alpha, sim_rho, sim_sigma2, sim_seed,
                                sim_out);
        if (*runc) {
            if (!config_path.empty()) {
                std::map<std::string, bool> given = {
                    {"dataset", o_dataset->count() > 0},
                    {"n_iterations", o_iters->count() > 0},
                    {"n_particles", o_particles->count() > 0},
                    {"seed", o_seed->count() > 0},
                    {"alpha0", o_alpha0->count() > 0},
                    {"rho", o_rho->count() > 0},
                    {"sigma2", o_sigma2->count() > 0},
                    {"schedule.kind", o_kind->count() > 0},
                    {"schedule.c_gamma", o_cg->count() > 0},
                    {"schedule.eta_gamma", o_eg->count() > 0},
                    {"schedule.c_p", o_cp->count() > 0},
                    {"schedule.eta_p", o_ep->count() > 0},
                    {"projection.c_lower", o_cl->count() > 0},
                    {"projection.eps_lower", o_el->count() > 0},
                    {"projection.c_upper1", o_cu1->count() > 0},
                    {"projection.c_upper2", o_cu2->count() > 0},
                    {"projection.eps_upper", o_eu->count() > 0},
                    {"policy", o_policy->count() > 0},
                    {"trace_every", o_thin->count() > 0},
                };
                apply_config(cfg, read_config_file(config_path), given);
            }
            if (cfg.dataset.empty())
                throw std::invalid_argument("run: --dataset is required");
            return cmd_run(cfg, trace_path, replicates);
        }
        if (*val) {
            if (!vconfig_path.empty())
                apply_config(vcfg, read_config_file(vconfig_path), {});
            return cmd_validate(vcfg, ex);
        }
        if (*bnd) {
            const bool have_drift = ob_l->count() && ob_b->count() && ob_d->count();
            const bool have_imh = ob_e->count() && ob_q->count() && ob_z->count();
            return cmd_bounds(have_drift, b_lambda, b_b, b_delta, b_v, b_r,
                              tight_rate, have_imh, b_eps, b_qv, b_zeta);
        }
        if (*vimh) return cmd_verify_imh(chain_path, vz, k_max);
        if (*orc)
            return cmd_oracle(orc_dataset, orc_min, orc_max, orc_points,
                              orc_order, orc_rho, orc_sigma2);
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
