#include "loopqr/serialize.hpp"

#include <cstdio>

#include "loopqr/errors.hpp"

namespace loopqr {

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

std::string code_name(const CodeSpec& code) {
  struct Visitor {
    std::string operator()(const GkpCode&) const { return "gkp"; }
    std::string operator()(const SteaneGkpCode&) const { return "steane-gkp"; }
    std::string operator()(const QpcCode&) const { return "qpc"; }
  };
  return std::visit(Visitor{}, code);
}

void to_json(nlohmann::json& j, const RepeaterConfig& cfg) {
  j = nlohmann::json{{"L_km", cfg.L_km},
                     {"segments", cfg.segments},
                     {"loops", cfg.loops},
                     {"L_att_km", cfg.L_att_km},
                     {"c_fiber_mps", cfg.c_fiber_mps},
                     {"p_link", cfg.p_link},
                     {"p_loop", cfg.p_loop},
                     {"p_bsm", cfg.p_bsm}};
}

namespace {

// Pull a field if present, complaining about its type with the field name.
template <typename T>
void fetch(const nlohmann::json& j, const char* key, T& into) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    into = it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string(key) + ": wrong JSON type");
  }
}

}  // namespace

void from_json(const nlohmann::json& j, RepeaterConfig& cfg) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  for (const auto& item : j.items()) {
    static const char* known[] = {"L_km",        "segments", "loops",  "L_att_km",
                                  "c_fiber_mps", "p_link",   "p_loop", "p_bsm"};
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw ValidationError("config: unknown key \"" + item.key() + "\"");
  }
  fetch(j, "L_km", cfg.L_km);
  fetch(j, "segments", cfg.segments);
  fetch(j, "loops", cfg.loops);
  fetch(j, "L_att_km", cfg.L_att_km);
  fetch(j, "c_fiber_mps", cfg.c_fiber_mps);
  fetch(j, "p_link", cfg.p_link);
  fetch(j, "p_loop", cfg.p_loop);
  fetch(j, "p_bsm", cfg.p_bsm);
}

nlohmann::json code_to_json(const CodeSpec& code) {
  struct Visitor {
    nlohmann::json operator()(const GkpCode& c) const {
      return {{"family", "gkp"}, {"squeezing_db", c.squeezing_db}};
    }
    nlohmann::json operator()(const SteaneGkpCode& c) const {
      return {{"family", "steane-gkp"},
              {"squeezing_db", c.squeezing_db},
              {"stategen", c.stategen == StategenMode::bare ? "bare" : "transferred"}};
    }
    nlohmann::json operator()(const QpcCode& c) const {
      return {{"family", "qpc"},
              {"photons_per_block", c.photons_per_block},
              {"blocks", c.blocks}};
    }
  };
  return std::visit(Visitor{}, code);
}

CodeSpec code_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("code: expected a JSON object");
  std::string family;
  fetch(j, "family", family);
  if (family == "gkp") {
    GkpCode c{15.0};
    fetch(j, "squeezing_db", c.squeezing_db);
    return c;
  }
  if (family == "steane-gkp") {
    SteaneGkpCode c{15.0, StategenMode::bare};
    fetch(j, "squeezing_db", c.squeezing_db);
    std::string mode = "bare";
    fetch(j, "stategen", mode);
    if (mode == "bare") {
      c.stategen = StategenMode::bare;
    } else if (mode == "transferred") {
      c.stategen = StategenMode::transferred;
    } else {
      throw ValidationError("stategen: expected \"bare\" or \"transferred\"");
    }
    return c;
  }
  if (family == "qpc") {
    QpcCode c{4, 16};
    fetch(j, "photons_per_block", c.photons_per_block);
    fetch(j, "blocks", c.blocks);
    return c;
  }
  throw ValidationError("family: expected \"gkp\", \"steane-gkp\" or \"qpc\"");
}

nlohmann::json breakdown_to_json(const RateBreakdown& rb) {
  nlohmann::json j{{"raw_rate_hz", rb.raw_rate_hz},
                   {"skf", rb.skf},
                   {"skr_hz", rb.skr_hz},
                   {"epsilon", rb.epsilon}};
  if (rb.gkp_probs) {
    j["p_corr"] = rb.gkp_probs->p_corr;
    j["p_swap"] = rb.gkp_probs->p_swap;
    j["p_stategen"] = rb.gkp_probs->p_stategen;
  }
  if (rb.qpc_teleport) j["p_qpc_teleport"] = *rb.qpc_teleport;
  return j;
}

std::string sweep_csv_row(const GridCell& cell, double L_km, const CodeSpec& code) {
  const RateBreakdown& r = cell.result;
  std::string row;
  row += std::to_string(cell.segments);
  row += ',';
  row += std::to_string(cell.loops);
  row += ',';
  row += format_g17(L_km);
  row += ',';
  row += csv_escape(code_name(code));
  row += ',';
  row += format_g17(r.raw_rate_hz);
  row += ',';
  row += format_g17(r.skf);
  row += ',';
  row += format_g17(r.skr_hz);
  row += ',';
  row += format_g17(r.epsilon);
  for (double v : {r.gkp_probs ? r.gkp_probs->p_corr : 0.0,
                   r.gkp_probs ? r.gkp_probs->p_swap : 0.0,
                   r.gkp_probs ? r.gkp_probs->p_stategen : 0.0}) {
    row += ',';
    row += r.gkp_probs ? format_g17(v) : "";
  }
  row += ',';
  row += r.qpc_teleport ? format_g17(*r.qpc_teleport) : "";
  return row;
}

}  // namespace loopqr
