#pragma once

// JSON (de)serialization of configs and results, plus CSV helpers for sweeps.

#include <string>

#include <json.hpp>

#include "loopqr/chain.hpp"
#include "loopqr/sweep.hpp"

namespace loopqr {

inline constexpr const char* kToolVersion = "0.1.0";

// Shortest round-trip-exact decimal form ("%.17g").
std::string format_g17(double x);

// RFC-4180: quote fields containing comma, quote or newline; double embedded quotes.
std::string csv_escape(const std::string& field);

std::string code_name(const CodeSpec& code);

void to_json(nlohmann::json& j, const RepeaterConfig& cfg);
void from_json(const nlohmann::json& j, RepeaterConfig& cfg);

nlohmann::json code_to_json(const CodeSpec& code);
// Throws ValidationError on unknown family / bad fields.
CodeSpec code_from_json(const nlohmann::json& j);

nlohmann::json breakdown_to_json(const RateBreakdown& rb);

inline constexpr const char* kSweepCsvHeader =
    "n,m,L_km,code,raw_rate_hz,skf,skr_hz,epsilon,p_corr,p_swap,p_stategen,p_qpc_teleport";

std::string sweep_csv_row(const GridCell& cell, double L_km, const CodeSpec& code);

}  // namespace loopqr
