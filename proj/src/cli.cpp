#include "lockrace/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "lockrace/analytic.hpp"
#include "lockrace/equilibrium.hpp"
#include "lockrace/hjb.hpp"
#include "lockrace/json_io.hpp"
#include "lockrace/montecarlo.hpp"
#include "lockrace/oracle.hpp"
#include "lockrace/quadrature.hpp"

namespace lockrace::cli {

namespace {

using nlohmann::json;

constexpr const char* kSeedEnvVar = "LOCKRACE_SEED";

std::string fmt9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string json_scalar_to_string(const json& v) {
    if (v.is_number_float()) return fmt9(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

void print_human(const json& j, std::ostream& os, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (j.is_object()) {
        for (const auto& [key, val] : j.items()) {
            if (val.is_object() || (val.is_array() && !val.empty() && val[0].is_object())) {
                os << pad << key << ":\n";
                print_human(val, os, indent + 1);
            } else if (val.is_array()) {
                os << pad << key << ": [";
                for (std::size_t i = 0; i < val.size(); ++i)
                    os << (i ? ", " : "") << json_scalar_to_string(val[i]);
                os << "]\n";
            } else {
                os << pad << key << ": " << json_scalar_to_string(val) << "\n";
            }
        }
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            os << pad << "- [" << i << "]\n";
            print_human(j[i], os, indent + 1);
        }
    } else {
        os << pad << json_scalar_to_string(j) << "\n";
    }
}

// ---------------- configuration ----------------

struct Flags {
    std::string config_path;
    GameParams gp;
    long reps = 0;
    std::uint64_t seed = 0;
    int segments = 0;
    double grid_h = 0.0;
    std::string format, out;

    CLI::Option* o_beta_i = nullptr;
    CLI::Option* o_beta_j = nullptr;
    CLI::Option* o_nu = nullptr;
    CLI::Option* o_horizon = nullptr;
    CLI::Option* o_locks = nullptr;
    CLI::Option* o_n_agents = nullptr;
    CLI::Option* o_reps = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_segments = nullptr;
    CLI::Option* o_grid_h = nullptr;
    CLI::Option* o_format = nullptr;
    CLI::Option* o_out = nullptr;
};

void add_common_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_path, "flat JSON config file");
    f.o_beta_i = cmd->add_option("--beta-i", f.gp.beta_i, "max rate of agent i");
    f.o_beta_j = cmd->add_option("--beta-j", f.gp.beta_j, "max rate of agent j");
    f.o_nu = cmd->add_option("--nu", f.gp.nu, "cost trade-off factor");
    f.o_horizon = cmd->add_option("--horizon", f.gp.horizon, "deadline T");
    f.o_locks = cmd->add_option("--locks", f.gp.locks, "number of locks (1 or 2)");
    f.o_n_agents = cmd->add_option("--n-agents", f.gp.n_agents, "number of agents");
    f.o_reps = cmd->add_option("--reps", f.reps, "Monte Carlo replications");
    f.o_seed = cmd->add_option("--seed", f.seed, "RNG seed");
    f.o_segments = cmd->add_option("--segments", f.segments, "grid-search segments");
    f.o_grid_h = cmd->add_option("--grid-h", f.grid_h, "HJB grid spacing");
    f.o_format = cmd->add_option("--format", f.format, "human | json | csv");
    f.o_out = cmd->add_option("--out", f.out, "output path (default stdout)");
}

RunConfig config_defaults() {
    RunConfig c;
    if (const char* env = std::getenv(kSeedEnvVar)) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0')
            throw std::invalid_argument(std::string(kSeedEnvVar) +
                                        " must be a 64-bit unsigned integer");
        c.seed = v;
    }
    return c;
}

void apply_config_file(RunConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config parse error in " + path + ": " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config must be a flat JSON object");
    for (const auto& [key, val] : j.items()) {
        if (key == "beta_i") c.params.beta_i = val.get<double>();
        else if (key == "beta_j") c.params.beta_j = val.get<double>();
        else if (key == "nu") c.params.nu = val.get<double>();
        else if (key == "horizon") c.params.horizon = val.get<double>();
        else if (key == "locks") c.params.locks = val.get<int>();
        else if (key == "n_agents") c.params.n_agents = val.get<int>();
        else if (key == "reps") c.reps = val.get<long>();
        else if (key == "seed") c.seed = val.get<std::uint64_t>();
        else if (key == "n_segments") c.n_segments = val.get<int>();
        else if (key == "grid_h") c.grid_h = val.get<double>();
        else if (key == "format") c.format = val.get<std::string>();
        else if (key == "out") c.out = val.get<std::string>();
        else throw std::invalid_argument("unknown config key: " + key);
    }
}

RunConfig effective_config(const Flags& f, bool validate_game = true) {
    RunConfig c = config_defaults();
    if (!f.config_path.empty()) apply_config_file(c, f.config_path);
    if (f.o_beta_i->count()) c.params.beta_i = f.gp.beta_i;
    if (f.o_beta_j->count()) c.params.beta_j = f.gp.beta_j;
    if (f.o_nu->count()) c.params.nu = f.gp.nu;
    if (f.o_horizon->count()) c.params.horizon = f.gp.horizon;
    if (f.o_locks->count()) c.params.locks = f.gp.locks;
    if (f.o_n_agents->count()) c.params.n_agents = f.gp.n_agents;
    if (f.o_reps->count()) c.reps = f.reps;
    if (f.o_seed->count()) c.seed = f.seed;
    if (f.o_segments->count()) c.n_segments = f.segments;
    if (f.o_grid_h->count()) c.grid_h = f.grid_h;
    if (f.o_format->count()) c.format = f.format;
    if (f.o_out->count()) c.out = f.out;
    if (c.format != "human" && c.format != "json" && c.format != "csv")
        throw std::invalid_argument("format must be human, json or csv");
    if (validate_game) validate_params(c.params);
    return c;
}

// ---------------- per-command reports ----------------

struct CommandOutput {
    int status = 0;
    json report;
    std::vector<std::pair<std::string, std::string>> csv;  // ordered (column, value)
};

std::vector<double> profile_utilities(const eq::EquilibriumResult& r, const GameParams& p) {
    std::vector<double> out;
    const std::size_t n = r.thresholds.size();
    for (std::size_t k = 0; k < n; ++k) {
        GameParams pk = p;
        pk.beta_i = r.rates[k];
        // merged opponents: survival multiplies, so rates add on the common prefix
        double opp_rate = 0.0;
        double opp_psi = 0.0;
        if (n == 2) {
            opp_rate = r.rates[1 - k];
            opp_psi = r.thresholds[1 - k];
        } else {
            opp_rate = r.rates[k] * static_cast<double>(n - 1);
            opp_psi = r.thresholds[(k + 1) % n];  // symmetric profile
        }
        pk.beta_j = opp_rate;
        auto opp = make_threshold_control(opp_psi, opp_rate, p.horizon);
        if (r.locks == 1) {
            auto own = make_threshold_control(r.thresholds[k], r.rates[k], p.horizon);
            out.push_back(analytic::utility_one_lock(own, opp, pk).utility);
        } else {
            auto own = TwoStagePolicy::gamma2(r.thresholds[k], r.rates[k], p.horizon);
            auto oppp = TwoStagePolicy::one_lock(opp);
            out.push_back(analytic::utility_two_lock(own, oppp, pk).utility);
        }
    }
    return out;
}

CommandOutput cmd_solve(const RunConfig& c) {
    CommandOutput out;
    eq::EquilibriumResult r;
    if (c.params.n_agents > 2) {
        r = eq::nash_n_player_conjecture(c.params);
    } else {
        r = c.params.locks == 1 ? eq::nash_one_lock(c.params) : eq::nash_two_lock(c.params);
    }
    std::vector<double> utils = profile_utilities(r, c.params);
    out.report = json{{"params", c.params}, {"result", r}, {"utilities", utils}};
    out.csv = {{"psi_i", fmt9(r.thresholds[0])},
               {"psi_j", fmt9(r.thresholds.size() > 1 ? r.thresholds[1] : r.thresholds[0])},
               {"regime", r.regime},
               {"certified", r.certified ? "true" : "false"},
               {"j_i", fmt9(utils[0])},
               {"j_j", fmt9(utils.size() > 1 ? utils[1] : utils[0])}};
    return out;
}

CommandOutput cmd_br(const RunConfig& c, double psi_j, bool use_grid, int levels_choice) {
    CommandOutput out;
    oracle::GridSpec g;
    g.n_segments = c.n_segments;
    if (levels_choice == 2) g.levels = {0.0, c.params.beta_i};
    if (levels_choice == 3) g.levels = {0.0, 0.5 * c.params.beta_i, c.params.beta_i};

    if (c.params.locks == 2) {
        auto pi_j = TwoStagePolicy::gamma2(psi_j, c.params.beta_j, c.params.horizon);
        auto res = oracle::grid_best_response_two_stage(pi_j, c.params, g);
        out.report = json{{"params", c.params},
                          {"psi_j", psi_j},
                          {"mode", "grid (two-stage)"},
                          {"stage1", res.policy.stage1},
                          {"utility", res.utility},
                          {"certificate", res.certificate},
                          {"exhaustive", res.exhaustive},
                          {"evaluated", res.evaluated}};
        out.csv = {{"psi", "-1"}, {"utility", fmt9(res.utility)}};
        return out;
    }
    if (use_grid) {
        auto a_j = make_threshold_control(psi_j, c.params.beta_j, c.params.horizon);
        auto res = oracle::grid_best_response(a_j, c.params, g);
        out.report = json{{"params", c.params}, {"psi_j", psi_j},
                          {"mode", "grid"},      {"search", res}};
        out.csv = {{"psi", "-1"}, {"utility", fmt9(res.utility)}};
        return out;
    }
    auto br = eq::best_response_one_lock(psi_j, c.params);
    auto a_j = make_threshold_control(psi_j, c.params.beta_j, c.params.horizon);
    double util =
        analytic::utility_one_lock(br.policy.control(c.params.horizon), a_j, c.params).utility;
    out.report = json{{"params", c.params}, {"psi_j", psi_j},    {"mode", "closed_form"},
                      {"policy", br.policy}, {"note", br.note},  {"utility", util}};
    out.csv = {{"psi", fmt9(br.policy.psi)}, {"utility", fmt9(util)}};
    return out;
}

CommandOutput cmd_eval(const RunConfig& c, double psi_i, double psi_j) {
    CommandOutput out;
    const GameParams& p = c.params;
    UtilityReport cf_i, cf_j, q_i, q_j;
    if (p.locks == 1) {
        auto a_i = make_threshold_control(psi_i, p.beta_i, p.horizon);
        auto a_j = make_threshold_control(psi_j, p.beta_j, p.horizon);
        cf_i = analytic::utility_one_lock(a_i, a_j, p);
        cf_j = analytic::utility_one_lock(a_j, a_i, swap_agents(p));
        q_i = oracle::quadrature_utility(a_i, a_j, p);
        q_j = oracle::quadrature_utility(a_j, a_i, swap_agents(p));
    } else {
        auto pi_i = TwoStagePolicy::gamma2(psi_i, p.beta_i, p.horizon);
        auto pi_j = TwoStagePolicy::gamma2(psi_j, p.beta_j, p.horizon);
        cf_i = analytic::utility_two_lock(pi_i, pi_j, p);
        cf_j = analytic::utility_two_lock(pi_j, pi_i, swap_agents(p));
        q_i = oracle::two_stage_utility(pi_i, pi_j, p);
        q_j = oracle::two_stage_utility(pi_j, pi_i, swap_agents(p));
    }
    out.report = json{{"params", p},
                      {"psi_i", psi_i},
                      {"psi_j", psi_j},
                      {"agent_i", json{{"analytic", cf_i},
                                       {"quadrature", q_i},
                                       {"abs_diff", std::abs(cf_i.utility - q_i.utility)}}},
                      {"agent_j", json{{"analytic", cf_j},
                                       {"quadrature", q_j},
                                       {"abs_diff", std::abs(cf_j.utility - q_j.utility)}}}};
    out.csv = {{"j_i", fmt9(cf_i.utility)},
               {"j_j", fmt9(cf_j.utility)},
               {"quad_j_i", fmt9(q_i.utility)},
               {"quad_j_j", fmt9(q_j.utility)},
               {"abs_diff_i", fmt9(std::abs(cf_i.utility - q_i.utility))},
               {"abs_diff_j", fmt9(std::abs(cf_j.utility - q_j.utility))}};
    return out;
}

std::vector<TwoStagePolicy> build_profile(const GameParams& p, double psi_i, double psi_j,
                                          std::optional<double> psi_dev) {
    std::vector<TwoStagePolicy> pols;
    const int n = p.n_agents;
    for (int k = 0; k < n; ++k) {
        double psi = k == 0 ? psi_i : psi_j;
        double beta = k == 0 ? p.beta_i : p.beta_j;
        if (n > 2) beta = p.beta_i;  // symmetric N-player profiles
        if (k == 0 && psi_dev) psi = *psi_dev;
        pols.push_back(p.locks == 2
                           ? TwoStagePolicy::gamma2(psi, beta, p.horizon)
                           : TwoStagePolicy::one_lock(
                                 make_threshold_control(psi, beta, p.horizon)));
    }
    return pols;
}

CommandOutput cmd_simulate(const RunConfig& c, double psi_i, double psi_j,
                           std::optional<double> psi_dev) {
    CommandOutput out;
    auto pols = build_profile(c.params, psi_i, psi_j, psi_dev);
    mc::EstimateOptions opt;
    opt.reps = c.reps;
    opt.rng.seed = c.seed;
    auto reports = mc::estimate_utilities(pols, c.params, opt);
    out.report = json{{"params", c.params}, {"psi_i", psi_i},   {"psi_j", psi_j},
                      {"reps", c.reps},     {"seed", c.seed},   {"agents", reports}};
    if (psi_dev) out.report["psi_dev"] = *psi_dev;
    out.csv = {{"j_i", fmt9(reports[0].utility)},
               {"se_i", fmt9(reports[0].std_error.value_or(0.0))},
               {"j_j", fmt9(reports[1].utility)},
               {"se_j", fmt9(reports[1].std_error.value_or(0.0))},
               {"sp_i", fmt9(reports[0].success_prob)},
               {"cost_i", fmt9(reports[0].expected_cost)}};
    return out;
}

CommandOutput cmd_verify_hjb(const RunConfig& c, const std::string& hjb_case, double reward,
                             double beta, double U, double psi, double t1, bool fd,
                             double x_max) {
    CommandOutput out;
    hjb::CandidateValue cand;
    json cand_desc;
    if (hjb_case == "silent") {
        cand = hjb::candidate_W_silent(reward, c.params.nu, beta, U);
        cand_desc = json{{"case", "silent"}, {"c", reward}, {"nu", c.params.nu},
                         {"beta", beta},     {"U", U}};
    } else if (hjb_case == "threshold") {
        double use_t1 = t1 >= 0.0 ? t1
                                  : hjb::threshold_switch_time(c.params.beta_j, c.params.nu, psi,
                                                               c.params.horizon);
        cand = hjb::candidate_W_threshold(c.params.beta_i, c.params.beta_j, c.params.nu, psi,
                                          use_t1, c.params.horizon);
        cand_desc = json{{"case", "threshold"}, {"beta_i", c.params.beta_i},
                         {"beta_j", c.params.beta_j}, {"nu", c.params.nu},
                         {"psi", psi},          {"t1", use_t1},
                         {"horizon", c.params.horizon}};
    } else {
        throw std::invalid_argument("--case must be silent or threshold");
    }
    hjb::GridSpec2D grid;
    grid.h_t = grid.h_x = c.grid_h;
    grid.x_max = x_max;
    hjb::ResidualReport rep = hjb::hjb_residual(cand, grid, fd);
    out.report = json{{"candidate", cand_desc}, {"report", rep}};
    out.csv = {{"max_residual", fmt9(rep.max_residual)},
               {"boundary_error", fmt9(rep.boundary_error)},
               {"sign_violations", std::to_string(rep.sign_violations)}};
    if (!rep.ok) out.status = 1;
    return out;
}

// Paired-difference Monte Carlo estimate of a unilateral deviation's value
// (common random numbers).
struct PairedDiff {
    double diff = 0.0, std_error = 0.0, base = 0.0, dev = 0.0;
};
PairedDiff mc_paired_diff(const std::vector<TwoStagePolicy>& base,
                          const std::vector<TwoStagePolicy>& dev, std::size_t agent,
                          const GameParams& p, long reps, std::uint64_t seed) {
    double sum = 0.0, sumsq = 0.0, base_sum = 0.0, dev_sum = 0.0;
    for (long rep = 0; rep < reps; ++rep) {
        mc::RngSpec spec{seed, static_cast<std::uint64_t>(rep)};
        mc::Rng ra(spec), rb(spec);
        auto eb = mc::simulate_episode(base, p, ra);
        auto ed = mc::simulate_episode(dev, p, rb);
        double ub = eb.agents[agent].reward - p.nu * eb.agents[agent].cost;
        double ud = ed.agents[agent].reward - p.nu * ed.agents[agent].cost;
        sum += ud - ub;
        sumsq += (ud - ub) * (ud - ub);
        base_sum += ub;
        dev_sum += ud;
    }
    const double m = static_cast<double>(reps);
    PairedDiff r;
    r.diff = sum / m;
    r.base = base_sum / m;
    r.dev = dev_sum / m;
    double var = reps > 1 ? std::max(0.0, (sumsq - m * r.diff * r.diff) / (m - 1.0)) : 0.0;
    r.std_error = std::sqrt(var / m);
    return r;
}

CommandOutput cmd_certify(const RunConfig& c, std::optional<double> psi_i_opt,
                          std::optional<double> psi_j_opt, double tolerance) {
    CommandOutput out;
    const GameParams& p = c.params;

    if (p.n_agents > 2) {
        // §V conjecture probe: 21-point unilateral threshold deviations
        eq::EquilibriumResult ne = eq::nash_n_player_conjecture(p);
        auto profile = build_profile(p, ne.thresholds[0], ne.thresholds[0], std::nullopt);
        std::vector<double> grid;
        for (int k = 0; k <= 20; ++k) grid.push_back(p.horizon * k / 20.0);
        mc::EstimateOptions opt;
        opt.reps = c.reps;
        opt.rng.seed = c.seed;
        auto probe = mc::deviation_probe(profile, p, grid, opt);
        bool found = false;
        json points = json::array();
        for (const auto& pt : probe) {
            bool hit = pt.diff > tolerance + 3.0 * pt.std_error;
            found = found || hit;
            points.push_back(json{{"psi", pt.psi},
                                  {"diff", pt.diff},
                                  {"std_error", pt.std_error},
                                  {"deviation_found", hit}});
        }
        out.report = json{{"params", p},
                          {"ne", ne},
                          {"epsilon", tolerance},
                          {"reps", c.reps},
                          {"seed", c.seed},
                          {"probe", points},
                          {"verdict", found ? "deviation found" : "no profitable deviation"}};
        out.csv = {{"verdict", found ? "deviation found" : "no profitable deviation"}};
        out.status = found ? 2 : 0;
        return out;
    }

    eq::EquilibriumResult ne;
    if (psi_i_opt && psi_j_opt) {
        ne.locks = p.locks;
        ne.thresholds = {*psi_i_opt, *psi_j_opt};
        ne.rates = {p.beta_i, p.beta_j};
        ne.regime = "given profile";
    } else {
        ne = p.locks == 1 ? eq::nash_one_lock(p) : eq::nash_two_lock(p);
    }

    oracle::GridSpec g;
    g.n_segments = c.n_segments;

    auto base = build_profile(p, ne.thresholds[0], ne.thresholds[1], std::nullopt);
    bool any_found = false;
    json agents = json::array();
    for (std::size_t k = 0; k < 2; ++k) {
        GameParams pk = k == 0 ? p : swap_agents(p);
        double improvement_quad = 0.0;
        std::string certificate;
        std::vector<TwoStagePolicy> dev = base;
        if (p.locks == 1) {
            auto own = base[k].stage1;
            auto opp = base[1 - k].stage1;
            auto br = oracle::grid_best_response(opp, pk, g);
            improvement_quad = br.utility - oracle::quadrature_utility(own, opp, pk).utility;
            certificate = br.certificate;
            dev[k] = TwoStagePolicy::one_lock(br.control);
        } else {
            auto pi_j = base[1 - k];
            auto br = oracle::grid_best_response_two_stage(pi_j, pk, g);
            improvement_quad =
                br.utility - oracle::two_stage_utility(base[k], pi_j, pk).utility;
            certificate = br.certificate;
            dev[k] = br.policy;
        }
        PairedDiff mc = mc_paired_diff(base, dev, k, p, c.reps, c.seed);
        bool found = mc.diff > tolerance + 3.0 * mc.std_error;
        any_found = any_found || found;
        agents.push_back(json{{"agent", k == 0 ? "i" : "j"},
                              {"improvement_quad", improvement_quad},
                              {"certificate", certificate},
                              {"mc_diff", mc.diff},
                              {"mc_std_error", mc.std_error},
                              {"deviation_found", found}});
    }
    out.report = json{{"params", p},
                      {"ne", ne},
                      {"epsilon", tolerance},
                      {"segments", c.n_segments},
                      {"reps", c.reps},
                      {"seed", c.seed},
                      {"agents", agents},
                      {"verdict", any_found ? "deviation found" : "certified"}};
    out.csv = {{"verdict", any_found ? "deviation found" : "certified"},
               {"psi_i", fmt9(ne.thresholds[0])},
               {"psi_j", fmt9(ne.thresholds[1])}};
    out.status = any_found ? 2 : 0;
    return out;
}

// ---------------- output plumbing ----------------

void emit(const CommandOutput& res, const RunConfig& c, std::ostream& fallback) {
    std::ofstream file;
    std::ostream* os = &fallback;
    if (!c.out.empty()) {
        file.open(c.out);
        if (!file) throw std::invalid_argument("cannot open output path: " + c.out);
        os = &file;
    }
    if (c.format == "json") {
        *os << res.report.dump(2) << "\n";
    } else if (c.format == "csv") {
        for (std::size_t i = 0; i < res.csv.size(); ++i)
            *os << (i ? "," : "") << res.csv[i].first;
        *os << "\n";
        for (std::size_t i = 0; i < res.csv.size(); ++i)
            *os << (i ? "," : "") << res.csv[i].second;
        *os << "\n";
    } else {
        print_human(res.report, *os, 0);
    }
}

}  // namespace

RunConfig load_config(const std::string& path) {
    RunConfig c = config_defaults();
    apply_config_file(c, path);
    validate_params(c.params);
    return c;
}

int run(const std::vector<std::string>& args, std::ostream& out_stream, std::ostream& err) {
    CLI::App app{"solver-verifier-simulator for the lock-acquisition game"};
    app.require_subcommand(1);

    Flags f_solve, f_br, f_eval, f_sim, f_hjb, f_sweep, f_cert;

    CLI::App* solve = app.add_subcommand("solve", "closed-form Nash equilibrium");
    add_common_flags(solve, f_solve);

    CLI::App* br = app.add_subcommand("br", "best response against a threshold policy");
    add_common_flags(br, f_br);
    double br_psi_j = 0.0;
    bool br_grid = false;
    int br_levels = 0;
    br->add_option("--psi-j", br_psi_j, "opponent threshold")->required();
    br->add_flag("--grid", br_grid, "use the grid-search oracle");
    br->add_option("--levels", br_levels, "rate levels: 2 -> {0,beta}, 3 -> {0,beta/2,beta}");

    CLI::App* eval = app.add_subcommand("eval", "evaluate a policy pair (analytic + quadrature)");
    add_common_flags(eval, f_eval);
    double ev_psi_i = 0.0, ev_psi_j = 0.0;
    eval->add_option("--psi-i", ev_psi_i, "agent i threshold")->required();
    eval->add_option("--psi-j", ev_psi_j, "agent j threshold")->required();

    CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo utility estimates");
    add_common_flags(sim, f_sim);
    double sm_psi_i = 0.0, sm_psi_j = 0.0, sm_psi = -1.0, sm_psi_dev = -1.0;
    CLI::Option* o_sm_psi_dev;
    sim->add_option("--psi-i", sm_psi_i, "agent i threshold");
    sim->add_option("--psi-j", sm_psi_j, "agent j threshold");
    sim->add_option("--psi", sm_psi, "common threshold (N-player)");
    o_sm_psi_dev = sim->add_option("--psi-dev", sm_psi_dev, "agent-0 deviation threshold");

    CLI::App* hjbcmd = app.add_subcommand("verify-hjb", "verify a candidate value function");
    add_common_flags(hjbcmd, f_hjb);
    std::string hj_case;
    double hj_c = 1.0, hj_beta = 1.0, hj_U = 1.0, hj_psi = 0.0, hj_t1 = -1.0, hj_xmax = 0.0;
    bool hj_fd = false;
    hjbcmd->add_option("--case", hj_case, "silent | threshold")->required();
    hjbcmd->add_option("--c", hj_c, "reward (silent case)");
    hjbcmd->add_option("--beta", hj_beta, "rate (silent case)");
    hjbcmd->add_option("--U", hj_U, "horizon (silent case)");
    hjbcmd->add_option("--psi", hj_psi, "opponent threshold (threshold case)");
    hjbcmd->add_option("--t1", hj_t1, "declared switch time (default: from the case analysis)");
    hjbcmd->add_flag("--fd", hj_fd, "force finite-difference partials");
    hjbcmd->add_option("--x-max", hj_xmax, "state-grid upper bound (default beta*T + 1)");

    CLI::App* sweep = app.add_subcommand("sweep", "run a subcommand over a parameter range");
    add_common_flags(sweep, f_sweep);
    std::string sw_param, sw_command = "solve";
    double sw_from = 0.0, sw_to = 1.0;
    int sw_points = 10;
    double sw_psi_i = 0.0, sw_psi_j = 0.0;
    sweep->add_option("--param", sw_param, "nu | beta-i | beta-j | horizon | psi-i | psi-j")
        ->required();
    sweep->add_option("--from", sw_from)->required();
    sweep->add_option("--to", sw_to)->required();
    sweep->add_option("--points", sw_points)->required();
    sweep->add_option("--command", sw_command, "solve | eval | simulate (default solve)");
    sweep->add_option("--psi-i", sw_psi_i, "thresholds for eval/simulate");
    sweep->add_option("--psi-j", sw_psi_j);

    CLI::App* cert = app.add_subcommand("certify", "closed form + oracle search + MC verdict");
    add_common_flags(cert, f_cert);
    double ct_psi_i = 0.0, ct_psi_j = 0.0, ct_tol = 5e-3;
    CLI::Option *o_ct_psi_i, *o_ct_psi_j;
    o_ct_psi_i = cert->add_option("--psi-i", ct_psi_i, "certify this profile instead of solving");
    o_ct_psi_j = cert->add_option("--psi-j", ct_psi_j);
    cert->add_option("--tolerance", ct_tol, "epsilon(grid) for the deviation verdict");

    std::vector<std::string> argv_copy(args.rbegin(), args.rend());
    try {
        app.parse(argv_copy);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            out_stream << app.help();
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (solve->parsed()) {
            RunConfig c = effective_config(f_solve);
            CommandOutput res = cmd_solve(c);
            emit(res, c, out_stream);
            return res.status;
        }
        if (br->parsed()) {
            RunConfig c = effective_config(f_br);
            CommandOutput res = cmd_br(c, br_psi_j, br_grid, br_levels);
            emit(res, c, out_stream);
            return res.status;
        }
        if (eval->parsed()) {
            RunConfig c = effective_config(f_eval);
            CommandOutput res = cmd_eval(c, ev_psi_i, ev_psi_j);
            emit(res, c, out_stream);
            return res.status;
        }
        if (sim->parsed()) {
            RunConfig c = effective_config(f_sim);
            double pi = sm_psi >= 0.0 ? sm_psi : sm_psi_i;
            double pj = sm_psi >= 0.0 ? sm_psi : sm_psi_j;
            std::optional<double> dev;
            if (o_sm_psi_dev->count()) dev = sm_psi_dev;
            CommandOutput res = cmd_simulate(c, pi, pj, dev);
            emit(res, c, out_stream);
            return res.status;
        }
        if (hjbcmd->parsed()) {
            RunConfig c = effective_config(f_hjb, false);
            // the silent case carries its own parameters; skip game validation there
            if (hj_case != "silent") validate_params(c.params);
            CommandOutput res =
                cmd_verify_hjb(c, hj_case, hj_c, hj_beta, hj_U, hj_psi, hj_t1, hj_fd, hj_xmax);
            emit(res, c, out_stream);
            return res.status;
        }
        if (cert->parsed()) {
            RunConfig c = effective_config(f_cert);
            std::optional<double> pi, pj;
            if (o_ct_psi_i->count()) pi = ct_psi_i;
            if (o_ct_psi_j->count()) pj = ct_psi_j;
            CommandOutput res = cmd_certify(c, pi, pj, ct_tol);
            emit(res, c, out_stream);
            return res.status;
        }
        if (sweep->parsed()) {
            RunConfig c = effective_config(f_sweep);
            std::vector<json> rows;
            std::vector<std::vector<std::pair<std::string, std::string>>> csv_rows;
            for (int k = 0; k < sw_points; ++k) {
                double v = sw_points == 1
                               ? sw_from
                               : sw_from + (sw_to - sw_from) * k / (sw_points - 1.0);
                RunConfig ck = c;
                double pi = sw_psi_i, pj = sw_psi_j;
                if (sw_param == "nu") ck.params.nu = v;
                else if (sw_param == "beta-i") ck.params.beta_i = v;
                else if (sw_param == "beta-j") ck.params.beta_j = v;
                else if (sw_param == "horizon") ck.params.horizon = v;
                else if (sw_param == "psi-i") pi = v;
                else if (sw_param == "psi-j") pj = v;
                else throw std::invalid_argument("unknown sweep parameter: " + sw_param);
                validate_params(ck.params);
                CommandOutput step;
                if (sw_command == "solve") step = cmd_solve(ck);
                else if (sw_command == "eval") step = cmd_eval(ck, pi, pj);
                else if (sw_command == "simulate") step = cmd_simulate(ck, pi, pj, std::nullopt);
                else throw std::invalid_argument("sweep supports solve, eval, simulate");
                step.report["param"] = json{{"name", sw_param}, {"value", v}};
                rows.push_back(step.report);
                std::vector<std::pair<std::string, std::string>> row{{sw_param, fmt9(v)}};
                for (auto& kv : step.csv) row.push_back(kv);
                csv_rows.push_back(std::move(row));
            }
            std::ofstream file;
            std::ostream* os = &out_stream;
            if (!c.out.empty()) {
                file.open(c.out);
                if (!file) throw std::invalid_argument("cannot open output path: " + c.out);
                os = &file;
            }
            if (c.format == "json") {
                *os << json(rows).dump(2) << "\n";
            } else {  // csv is the native sweep format; human prints the same table
                for (std::size_t i = 0; i < csv_rows.front().size(); ++i)
                    *os << (i ? "," : "") << csv_rows.front()[i].first;
                *os << "\n";
                for (const auto& row : csv_rows) {
                    for (std::size_t i = 0; i < row.size(); ++i)
                        *os << (i ? "," : "") << row[i].second;
                    *os << "\n";
                }
            }
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: no subcommand\n";
    return 1;
}

}  // namespace lockrace::cli
