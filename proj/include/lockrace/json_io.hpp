#pragma once

#include <json.hpp>

#include "lockrace/control.hpp"
#include "lockrace/equilibrium.hpp"
#include "lockrace/hjb.hpp"
#include "lockrace/oracle.hpp"
#include "lockrace/params.hpp"
#include "lockrace/report.hpp"

// JSON encodings for every emitted report; each to_json/from_json pair
// round-trips field for field.
namespace lockrace {

void to_json(nlohmann::json& j, const GameParams& p);
void from_json(const nlohmann::json& j, GameParams& p);

void to_json(nlohmann::json& j, const PiecewiseConstantControl& c);
void from_json(const nlohmann::json& j, PiecewiseConstantControl& c);

void to_json(nlohmann::json& j, const ThresholdPolicy& p);
void from_json(const nlohmann::json& j, ThresholdPolicy& p);

void to_json(nlohmann::json& j, const UtilityReport& r);
void from_json(const nlohmann::json& j, UtilityReport& r);

namespace eq {
void to_json(nlohmann::json& j, const ConditionCheck& c);
void from_json(const nlohmann::json& j, ConditionCheck& c);
void to_json(nlohmann::json& j, const EquilibriumResult& r);
void from_json(const nlohmann::json& j, EquilibriumResult& r);
}  // namespace eq

namespace hjb {
void to_json(nlohmann::json& j, const ResidualReport& r);
void from_json(const nlohmann::json& j, ResidualReport& r);
}  // namespace hjb

namespace oracle {
void to_json(nlohmann::json& j, const SearchResult& r);
void from_json(const nlohmann::json& j, SearchResult& r);
}  // namespace oracle

}  // namespace lockrace
