#include "lockrace/json_io.hpp"

namespace lockrace {

void to_json(nlohmann::json& j, const GameParams& p) {
    j = nlohmann::json{{"beta_i", p.beta_i},   {"beta_j", p.beta_j}, {"nu", p.nu},
                       {"horizon", p.horizon}, {"locks", p.locks},   {"n_agents", p.n_agents}};
}

void from_json(const nlohmann::json& j, GameParams& p) {
    j.at("beta_i").get_to(p.beta_i);
    j.at("beta_j").get_to(p.beta_j);
    j.at("nu").get_to(p.nu);
    j.at("horizon").get_to(p.horizon);
    j.at("locks").get_to(p.locks);
    j.at("n_agents").get_to(p.n_agents);
}

void to_json(nlohmann::json& j, const PiecewiseConstantControl& c) {
    j = nlohmann::json{{"breakpoints", c.breakpoints()}, {"levels", c.levels()}};
}

void from_json(const nlohmann::json& j, PiecewiseConstantControl& c) {
    c = PiecewiseConstantControl(j.at("breakpoints").get<std::vector<double>>(),
                                 j.at("levels").get<std::vector<double>>());
}

void to_json(nlohmann::json& j, const ThresholdPolicy& p) {
    j = nlohmann::json{{"psi", p.psi}, {"rate", p.rate}};
}

void from_json(const nlohmann::json& j, ThresholdPolicy& p) {
    j.at("psi").get_to(p.psi);
    j.at("rate").get_to(p.rate);
}

void to_json(nlohmann::json& j, const UtilityReport& r) {
    j = nlohmann::json{{"success_prob", r.success_prob},
                       {"expected_cost", r.expected_cost},
                       {"utility", r.utility},
                       {"method", to_string(r.method)}};
    if (r.std_error) j["std_error"] = *r.std_error;
}

void from_json(const nlohmann::json& j, UtilityReport& r) {
    j.at("success_prob").get_to(r.success_prob);
    j.at("expected_cost").get_to(r.expected_cost);
    j.at("utility").get_to(r.utility);
    r.method = eval_method_from_string(j.at("method").get<std::string>());
    r.std_error.reset();
    if (j.contains("std_error")) r.std_error = j.at("std_error").get<double>();
}

namespace eq {

void to_json(nlohmann::json& j, const ConditionCheck& c) {
    j = nlohmann::json{{"name", c.name},
                       {"applicable", c.applicable},
                       {"satisfied", c.satisfied},
                       {"lhs", c.lhs},
                       {"rhs", c.rhs}};
}

void from_json(const nlohmann::json& j, ConditionCheck& c) {
    j.at("name").get_to(c.name);
    j.at("applicable").get_to(c.applicable);
    j.at("satisfied").get_to(c.satisfied);
    j.at("lhs").get_to(c.lhs);
    j.at("rhs").get_to(c.rhs);
}

void to_json(nlohmann::json& j, const EquilibriumResult& r) {
    j = nlohmann::json{{"locks", r.locks},
                       {"n_agents", r.n_agents},
                       {"thresholds", r.thresholds},
                       {"rates", r.rates},
                       {"regime", r.regime},
                       {"certified", r.certified},
                       {"conjectural", r.conjectural},
                       {"boundary_tie", r.boundary_tie},
                       {"conditions", r.conditions}};
    if (!r.oracle_hint.empty()) j["oracle_hint"] = r.oracle_hint;
}

void from_json(const nlohmann::json& j, EquilibriumResult& r) {
    j.at("locks").get_to(r.locks);
    j.at("n_agents").get_to(r.n_agents);
    j.at("thresholds").get_to(r.thresholds);
    j.at("rates").get_to(r.rates);
    j.at("regime").get_to(r.regime);
    j.at("certified").get_to(r.certified);
    j.at("conjectural").get_to(r.conjectural);
    j.at("boundary_tie").get_to(r.boundary_tie);
    j.at("conditions").get_to(r.conditions);
    r.oracle_hint.clear();
    if (j.contains("oracle_hint")) j.at("oracle_hint").get_to(r.oracle_hint);
}

}  // namespace eq

namespace hjb {

void to_json(nlohmann::json& j, const ResidualReport& r) {
    j = nlohmann::json{{"max_residual", r.max_residual},
                       {"boundary_error", r.boundary_error},
                       {"sign_violations", r.sign_violations},
                       {"h_t", r.h_t},
                       {"h_x", r.h_x},
                       {"used_closed_partials", r.used_closed_partials},
                       {"ok", r.ok}};
    if (!r.note.empty()) j["note"] = r.note;
}

void from_json(const nlohmann::json& j, ResidualReport& r) {
    j.at("max_residual").get_to(r.max_residual);
    j.at("boundary_error").get_to(r.boundary_error);
    j.at("sign_violations").get_to(r.sign_violations);
    j.at("h_t").get_to(r.h_t);
    j.at("h_x").get_to(r.h_x);
    j.at("used_closed_partials").get_to(r.used_closed_partials);
    j.at("ok").get_to(r.ok);
    r.note.clear();
    if (j.contains("note")) j.at("note").get_to(r.note);
}

}  // namespace hjb

namespace oracle {

void to_json(nlohmann::json& j, const SearchResult& r) {
    j = nlohmann::json{{"control", r.control},
                       {"utility", r.utility},
                       {"certificate", r.certificate},
                       {"exhaustive", r.exhaustive},
                       {"evaluated", r.evaluated}};
}

void from_json(const nlohmann::json& j, SearchResult& r) {
    j.at("control").get_to(r.control);
    j.at("utility").get_to(r.utility);
    j.at("certificate").get_to(r.certificate);
    j.at("exhaustive").get_to(r.exhaustive);
    j.at("evaluated").get_to(r.evaluated);
}

}  // namespace oracle

}  // namespace lockrace
