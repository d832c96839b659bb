// loopqr: secret-key rates of memory-based all-optical repeater chains.
//
// Subcommands: rate, sweep, threshold, validate.  Configuration comes from a
// JSON file (--config) and/or flags; flags win.  Exit codes: 0 success,
// 2 config validation error, 3 numerical-domain/threshold error,
// 4 validation-suite failure.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "loopqr/chain.hpp"
#include "loopqr/errors.hpp"
#include "loopqr/geom_stats.hpp"
#include "loopqr/mc_oracle.hpp"
#include "loopqr/serialize.hpp"
#include "loopqr/sweep.hpp"

namespace {

using namespace loopqr;
using nlohmann::json;

std::string utc_now_string() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json manifest_json(const RepeaterConfig& cfg, const CodeSpec& code) {
  json j;
  j["tool"] = "loopqr";
  j["version"] = kToolVersion;
  j["generated_utc"] = utc_now_string();
  j["chain"] = cfg;
  j["code"] = code_to_json(code);
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::fputs(text.c_str(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("output: cannot open " + path + " for writing");
  out << text;
}

// ---------------------------------------------------------------- config --

struct ChainFlags {
  std::optional<double> L, L_att, c_fiber, p_link, p_loop, p_bsm;
  std::optional<int> n;
  std::optional<long long> m;
};

struct CodeFlags {
  std::optional<std::string> family, stategen;
  std::optional<double> s;
  std::optional<int> a, b;
};

void add_chain_flags(CLI::App* cmd, ChainFlags& f) {
  cmd->add_option("--L,--L-km", f.L, "total distance [km]");
  cmd->add_option("--n,--segments", f.n, "number of chain segments");
  cmd->add_option("--m,--loops", f.m, "correction rounds per signaling period");
  cmd->add_option("--L-att", f.L_att, "fiber attenuation length [km]");
  cmd->add_option("--c-fiber", f.c_fiber, "fiber signal velocity [m/s]");
  cmd->add_option("--p-link", f.p_link, "single-photon coupling efficiency");
  cmd->add_option("--p-loop", f.p_loop, "encoded-state loop coupling efficiency");
  cmd->add_option("--p-bsm", f.p_bsm, "physical BSM success probability");
}

void add_code_flags(CLI::App* cmd, CodeFlags& f) {
  cmd->add_option("--code", f.family, "code family: gkp | steane-gkp | qpc");
  cmd->add_option("--s,--squeezing-db", f.s, "GKP squeezing [dB]");
  cmd->add_option("--stategen", f.stategen,
                  "steane-gkp state-generation error level: bare | transferred");
  cmd->add_option("--a,--photons-per-block", f.a, "QPC photons per block");
  cmd->add_option("--b,--blocks", f.b, "QPC block count");
}

// Reads the "chain" and "code" sections; any other top-level key is ignored
// so that emitted result documents can be fed straight back in.
void load_config_file(const std::string& path, RepeaterConfig& cfg, CodeSpec& code) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config: invalid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  if (j.contains("chain")) cfg = j.at("chain").get<RepeaterConfig>();
  if (j.contains("code")) code = code_from_json(j.at("code"));
}

void apply_chain_flags(const ChainFlags& f, RepeaterConfig& cfg) {
  if (f.L) cfg.L_km = *f.L;
  if (f.n) cfg.segments = *f.n;
  if (f.m) cfg.loops = *f.m;
  if (f.L_att) cfg.L_att_km = *f.L_att;
  if (f.c_fiber) cfg.c_fiber_mps = *f.c_fiber;
  if (f.p_link) cfg.p_link = *f.p_link;
  if (f.p_loop) cfg.p_loop = *f.p_loop;
  if (f.p_bsm) cfg.p_bsm = *f.p_bsm;
}

CodeSpec apply_code_flags(const CodeFlags& f, CodeSpec code) {
  if (f.family) {
    if (*f.family == "gkp") {
      GkpCode c{15.0};
      if (auto* g = std::get_if<GkpCode>(&code)) c = *g;
      else if (auto* sg = std::get_if<SteaneGkpCode>(&code)) c.squeezing_db = sg->squeezing_db;
      code = c;
    } else if (*f.family == "steane-gkp") {
      SteaneGkpCode c{15.0, StategenMode::bare};
      if (auto* sg = std::get_if<SteaneGkpCode>(&code)) c = *sg;
      else if (auto* g = std::get_if<GkpCode>(&code)) c.squeezing_db = g->squeezing_db;
      code = c;
    } else if (*f.family == "qpc") {
      QpcCode c{4, 16};
      if (auto* qp = std::get_if<QpcCode>(&code)) c = *qp;
      code = c;
    } else {
      throw ValidationError("--code: expected \"gkp\", \"steane-gkp\" or \"qpc\"");
    }
  }
  if (f.s) {
    if (auto* g = std::get_if<GkpCode>(&code)) g->squeezing_db = *f.s;
    else if (auto* sg = std::get_if<SteaneGkpCode>(&code)) sg->squeezing_db = *f.s;
    else throw ValidationError("--s: only meaningful for gkp / steane-gkp codes");
  }
  if (f.stategen) {
    auto* sg = std::get_if<SteaneGkpCode>(&code);
    if (!sg) throw ValidationError("--stategen: only meaningful for steane-gkp codes");
    if (*f.stategen == "bare") sg->stategen = StategenMode::bare;
    else if (*f.stategen == "transferred") sg->stategen = StategenMode::transferred;
    else throw ValidationError("--stategen: expected \"bare\" or \"transferred\"");
  }
  if (f.a) {
    auto* qp = std::get_if<QpcCode>(&code);
    if (!qp) throw ValidationError("--a: only meaningful for qpc codes");
    qp->photons_per_block = *f.a;
  }
  if (f.b) {
    auto* qp = std::get_if<QpcCode>(&code);
    if (!qp) throw ValidationError("--b: only meaningful for qpc codes");
    qp->blocks = *f.b;
  }
  return code;
}

// ------------------------------------------------------------------ rate --

int cmd_rate(const RepeaterConfig& cfg, const CodeSpec& code, bool as_json,
             const std::string& out_path) {
  const RateBreakdown rb = secret_key_rate(cfg, code);
  const DerivedLink link = derive_link(cfg);

  if (as_json) {
    json j = manifest_json(cfg, code);
    j["derived"] = {{"p", link.p},
                    {"q", link.q},
                    {"eta_loop", link.eta_loop},
                    {"tau0_s", link.tau0_s},
                    {"eta_total", link.eta_total},
                    {"plob_bound_bits", plob_bound(link.eta_total)}};
    j["result"] = breakdown_to_json(rb);
    write_text(out_path, j.dump(2) + "\n");
    return 0;
  }

  std::string text;
  char line[256];
  std::snprintf(line, sizeof(line), "chain: L = %g km, n = %d segments (L0 = %g km), m = %lld loops\n",
                cfg.L_km, cfg.segments, cfg.L_km / cfg.segments, cfg.loops);
  text += line;
  std::snprintf(line, sizeof(line), "link:  p = %s, tau0 = %s s, eta_loop = %s\n",
                format_g17(link.p).c_str(), format_g17(link.tau0_s).c_str(),
                format_g17(link.eta_loop).c_str());
  text += line;
  text += "code:  " + code_name(code);
  if (auto* g = std::get_if<GkpCode>(&code)) {
    std::snprintf(line, sizeof(line), " (squeezing %g dB)", g->squeezing_db);
    text += line;
  } else if (auto* sg = std::get_if<SteaneGkpCode>(&code)) {
    std::snprintf(line, sizeof(line), " (squeezing %g dB, %s stategen)", sg->squeezing_db,
                  sg->stategen == StategenMode::bare ? "bare" : "transferred");
    text += line;
  } else if (auto* qp = std::get_if<QpcCode>(&code)) {
    std::snprintf(line, sizeof(line), " (a = %d photons/block, b = %d blocks)",
                  qp->photons_per_block, qp->blocks);
    text += line;
  }
  text += "\n";
  std::snprintf(line, sizeof(line), "raw rate         R = %s Hz\n", format_g17(rb.raw_rate_hz).c_str());
  text += line;
  std::snprintf(line, sizeof(line), "QBER       epsilon = %s\n", format_g17(rb.epsilon).c_str());
  text += line;
  std::snprintf(line, sizeof(line), "secret fraction  r = %s\n", format_g17(rb.skf).c_str());
  text += line;
  std::snprintf(line, sizeof(line), "secret key rate  S = %s Hz\n", format_g17(rb.skr_hz).c_str());
  text += line;
  if (rb.gkp_probs) {
    std::snprintf(line, sizeof(line), "p_corr = %s, p_swap = %s, p_stategen = %s\n",
                  format_g17(rb.gkp_probs->p_corr).c_str(),
                  format_g17(rb.gkp_probs->p_swap).c_str(),
                  format_g17(rb.gkp_probs->p_stategen).c_str());
    text += line;
  }
  if (rb.qpc_teleport) {
    std::snprintf(line, sizeof(line), "p_qpc_teleport = %s\n", format_g17(*rb.qpc_teleport).c_str());
    text += line;
  }
  std::snprintf(line, sizeof(line), "PLOB bound = %s bits/use (eta_total = %s)\n",
                format_g17(plob_bound(link.eta_total)).c_str(),
                format_g17(link.eta_total).c_str());
  text += line;
  write_text(out_path, text);
  return 0;
}

// ----------------------------------------------------------------- sweep --

int cmd_sweep(const RepeaterConfig& cfg, const CodeSpec& code, const std::vector<int>& n_values,
              const std::vector<long long>& m_values, const std::vector<double>& distances,
              long long m_max, int threads, const std::string& out_path) {
  const bool grid = !n_values.empty() || !m_values.empty();
  const bool dist = !distances.empty();
  if (grid == dist)
    throw ValidationError("sweep: choose exactly one of --n-values/--m-values or --distances");

  std::string csv = std::string(kSweepCsvHeader) + "\n";
  json manifest = manifest_json(cfg, code);
  manifest["command"] = "sweep";

  if (grid) {
    const std::vector<GridCell> cells = scan_nm(cfg, code, n_values, m_values, threads);
    for (const GridCell& cell : cells) csv += sweep_csv_row(cell, cfg.L_km, code) + "\n";
    manifest["n_values"] = n_values;
    manifest["m_values"] = m_values;
  } else {
    const std::vector<DistancePoint> pts =
        distance_curve(cfg, code, distances, {1, m_max}, threads);
    for (const DistancePoint& pt : pts) {
      GridCell cell{cfg.segments, pt.m, pt.result};
      csv += sweep_csv_row(cell, pt.L_km, code) + "\n";
    }
    manifest["distances_km"] = distances;
    manifest["m_range"] = {{"lo", 1}, {"hi", m_max}};
  }

  write_text(out_path, csv);
  if (!out_path.empty()) {
    manifest["output"] = out_path;
    write_text(out_path + ".manifest.json", manifest.dump(2) + "\n");
  }
  return 0;
}

// ------------------------------------------------------------- threshold --

int cmd_threshold(const RepeaterConfig& cfg, const CodeSpec& code, double target, long long m_max,
                  double resolution_db, bool as_json, const std::string& out_path) {
  const ThresholdResult tr = squeezing_threshold(cfg, code, target, {1, m_max}, resolution_db);

  // Re-evaluate at the reported threshold so the emission shows what it buys.
  CodeSpec at = code;
  if (auto* g = std::get_if<GkpCode>(&at)) g->squeezing_db = tr.threshold_db;
  if (auto* sg = std::get_if<SteaneGkpCode>(&at)) sg->squeezing_db = tr.threshold_db;
  const OptimizeMResult best = optimize_m(cfg, at, {1, m_max});

  if (as_json) {
    json j = manifest_json(cfg, code);
    j["result"] = {{"threshold_db", tr.threshold_db},
                   {"bracket_lo_db", tr.bracket_lo_db},
                   {"bracket_hi_db", tr.bracket_hi_db},
                   {"target_skf", tr.target_skf},
                   {"skf_at_threshold", best.best.skf},
                   {"m_at_threshold", best.m}};
    write_text(out_path, j.dump(2) + "\n");
    return 0;
  }

  char line[256];
  std::string text;
  std::snprintf(line, sizeof(line), "squeezing threshold: %.10g dB (bracket [%.10g, %.10g], target skf > %g)\n",
                tr.threshold_db, tr.bracket_lo_db, tr.bracket_hi_db, tr.target_skf);
  text += line;
  std::snprintf(line, sizeof(line), "at threshold: skf = %s with m = %lld\n",
                format_g17(best.best.skf).c_str(), best.m);
  text += line;
  write_text(out_path, text);
  return 0;
}

// -------------------------------------------------------------- validate --

struct VRow {
  std::string quantity, params, model;
  double analytic;
  McEstimate est;
  bool gated;
};

double z_score(const VRow& r) {
  const double diff = r.est.mean - r.analytic;
  if (r.est.std_error == 0.0) return diff == 0.0 ? 0.0 : INFINITY;
  return diff / r.est.std_error;
}

int cmd_validate(std::uint64_t samples, std::uint64_t seed, int threads, bool as_json,
                 const std::string& out_path) {
  const McSettings ind{samples, seed, DependenceModel::independent_pairs, threads};
  const McSettings chn{samples, seed, DependenceModel::chain, threads};

  std::vector<VRow> rows;
  char params[128];

  // Exponential moments of the total waiting time.
  const struct { double a, q; int n; } dsum_cases[] = {
      {0.99, 0.9, 5}, {0.9, 0.5, 3}, {0.5, 0.2, 10}, {0.7, 0.0, 4}};
  for (const auto& c : dsum_cases) {
    std::snprintf(params, sizeof(params), "a=%g q=%g n=%d", c.a, c.q, c.n);
    rows.push_back({"expect_pow_dsum", params, "independent", expect_pow_dsum(c.a, c.q, c.n),
                    mc_expect_pow_dsum(c.a, c.q, c.n, ind), true});
  }

  // Raw rates.
  const double tau0 = 5e-4;
  const struct { int n; double p; } rate_cases[] = {{2, 0.9}, {10, 0.1}, {100, 0.005}, {10, 0.005}};
  for (const auto& c : rate_cases) {
    std::snprintf(params, sizeof(params), "n=%d p=%g tau0=%g", c.n, c.p, tau0);
    rows.push_back({"raw_rate", params, "independent", raw_rate(c.n, c.p, tau0),
                    mc_raw_rate(c.n, c.p, tau0, ind), true});
  }

  // QBERs for each code family's error accounting.  The second gkp row sits
  // far from the epsilon = 1/2 saturation point, where the comparison has
  // actual statistical teeth.
  const GkpElementaryProbs probs{1e-3, 1e-4, 1e-4};
  const int qn = 10;
  const long long qm = 20;
  const double qq = 0.99;
  std::snprintf(params, sizeof(params), "pc=%g ps=%g pg=%g n=%d m=%d q=%g", probs.p_corr,
                probs.p_swap, probs.p_stategen, 5, 5, 0.9);
  rows.push_back({"qber_gkp", params, "independent", qber_gkp(probs, 5, 5, 0.9),
                  mc_qber(probs, 5, 5, 0.9, CodeLevel::gkp, StategenMode::bare, ind), true});
  std::snprintf(params, sizeof(params), "pc=%g ps=%g pg=%g n=%d m=%lld q=%g", probs.p_corr,
                probs.p_swap, probs.p_stategen, qn, qm, qq);
  rows.push_back({"qber_gkp", params, "independent", qber_gkp(probs, qn, qm, qq),
                  mc_qber(probs, qn, qm, qq, CodeLevel::gkp, StategenMode::bare, ind), true});
  rows.push_back({"qber_steane[bare]", params, "independent",
                  qber_steane(probs, qn, qm, qq, StategenMode::bare),
                  mc_qber(probs, qn, qm, qq, CodeLevel::steane, StategenMode::bare, ind), true});
  rows.push_back({"qber_steane[transferred]", params, "independent",
                  qber_steane(probs, qn, qm, qq, StategenMode::transferred),
                  mc_qber(probs, qn, qm, qq, CodeLevel::steane, StategenMode::transferred, ind),
                  true});

  // Chain dependence model: the closed forms assume independent station
  // waits, so these rows measure the approximation gap and are never gated.
  rows.push_back({"expect_pow_dsum", "a=0.99 q=0.9 n=5", "chain", expect_pow_dsum(0.99, 0.9, 5),
                  mc_expect_pow_dsum(0.99, 0.9, 5, chn), false});
  std::snprintf(params, sizeof(params), "pc=%g ps=%g pg=%g n=%d m=%lld q=%g", probs.p_corr,
                probs.p_swap, probs.p_stategen, qn, qm, qq);
  rows.push_back({"qber_gkp", params, "chain", qber_gkp(probs, qn, qm, qq),
                  mc_qber(probs, qn, qm, qq, CodeLevel::gkp, StategenMode::bare, chn), false});

  double max_gated_z = 0.0;
  for (const VRow& r : rows)
    if (r.gated) max_gated_z = std::max(max_gated_z, std::fabs(z_score(r)));
  const bool pass = max_gated_z <= 5.0;

  if (as_json) {
    json j;
    j["tool"] = "loopqr";
    j["version"] = kToolVersion;
    j["generated_utc"] = utc_now_string();
    j["samples"] = samples;
    j["seed"] = seed;
    j["rows"] = json::array();
    for (const VRow& r : rows) {
      j["rows"].push_back({{"quantity", r.quantity},
                           {"params", r.params},
                           {"model", r.model},
                           {"analytic", r.analytic},
                           {"mc_mean", r.est.mean},
                           {"mc_std_error", r.est.std_error},
                           {"z", z_score(r)},
                           {"gated", r.gated}});
    }
    j["max_abs_gated_z"] = max_gated_z;
    j["pass"] = pass;
    write_text(out_path, j.dump(2) + "\n");
    return pass ? 0 : 4;
  }

  std::string text;
  char line[320];
  std::snprintf(line, sizeof(line), "validation suite: %llu samples, seed %llu\n",
                static_cast<unsigned long long>(samples), static_cast<unsigned long long>(seed));
  text += line;
  std::snprintf(line, sizeof(line), "%-26s %-40s %-12s %-22s %-22s %-12s %9s  %s\n", "quantity",
                "params", "model", "analytic", "mc_mean", "mc_se", "z", "gated");
  text += line;
  for (const VRow& r : rows) {
    std::snprintf(line, sizeof(line), "%-26s %-40s %-12s %-22.15g %-22.15g %-12.4g %9.3f  %s\n",
                  r.quantity.c_str(), r.params.c_str(), r.model.c_str(), r.analytic, r.est.mean,
                  r.est.std_error, z_score(r), r.gated ? "yes" : "no");
    text += line;
  }
  std::snprintf(line, sizeof(line), "max |z| over gated rows: %.3f -> %s\n", max_gated_z,
                pass ? "PASS" : "FAIL");
  text += line;
  write_text(out_path, text);
  return pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"secret-key rates of memory-based all-optical repeater chains"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  bool as_json = false;
  ChainFlags chain_flags;
  CodeFlags code_flags;

  auto add_common = [&](CLI::App* cmd, bool with_code = true) {
    cmd->add_option("--config", config_path, "JSON config file with \"chain\" and \"code\" sections");
    cmd->add_option("--output,-o", out_path, "write output to this file instead of stdout");
    add_chain_flags(cmd, chain_flags);
    if (with_code) add_code_flags(cmd, code_flags);
  };

  CLI::App* rate = app.add_subcommand("rate", "rates for one configuration");
  add_common(rate);
  rate->add_flag("--json", as_json, "emit JSON instead of the human-readable summary");

  CLI::App* sweep = app.add_subcommand("sweep", "n-m grid or distance curve as CSV");
  add_common(sweep);
  std::vector<int> n_values;
  std::vector<long long> m_values;
  std::vector<double> distances;
  long long m_max = 2000;
  int threads = 0;
  sweep->add_option("--n-values", n_values, "segment counts (grid mode)")->delimiter(',');
  sweep->add_option("--m-values", m_values, "loop counts (grid mode)")->delimiter(',');
  sweep->add_option("--distances", distances, "total distances [km] (curve mode, m optimized)")
      ->delimiter(',');
  sweep->add_option("--m-max", m_max, "upper end of the m optimization range (curve mode)");
  sweep->add_option("--threads", threads, "worker threads (0: LOOPQR_THREADS or hardware)");

  CLI::App* threshold = app.add_subcommand("threshold", "minimal squeezing for a positive key");
  add_common(threshold);
  double target = 0.0, resolution_db = 0.1;
  threshold->add_option("--target", target, "required secret-key fraction (exclusive)");
  threshold->add_option("--resolution-db", resolution_db, "bisection resolution [dB]");
  threshold->add_option("--m-max", m_max, "upper end of the m optimization range");
  threshold->add_flag("--json", as_json, "emit JSON instead of the human-readable summary");

  CLI::App* validate = app.add_subcommand("validate", "Monte Carlo validation of the closed forms");
  std::uint64_t samples = 400000, seed = 1;
  validate->add_option("--samples", samples, "samples per estimator");
  validate->add_option("--seed", seed, "RNG seed");
  validate->add_option("--threads", threads, "worker threads (0: LOOPQR_THREADS or hardware)");
  validate->add_option("--output,-o", out_path, "write the report to this file instead of stdout");
  validate->add_flag("--json", as_json, "emit JSON rows instead of the table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    RepeaterConfig cfg;
    CodeSpec code = GkpCode{15.0};
    if (!config_path.empty()) load_config_file(config_path, cfg, code);
    apply_chain_flags(chain_flags, cfg);
    code = apply_code_flags(code_flags, code);

    if (app.got_subcommand(rate)) return cmd_rate(cfg, code, as_json, out_path);
    if (app.got_subcommand(sweep))
      return cmd_sweep(cfg, code, n_values, m_values, distances, m_max, threads, out_path);
    if (app.got_subcommand(threshold))
      return cmd_threshold(cfg, code, target, m_max, resolution_db, as_json, out_path);
    if (app.got_subcommand(validate))
      return cmd_validate(samples, seed, threads, as_json, out_path);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const ThresholdError& e) {
    std::fprintf(stderr, "threshold: %s\n  bracket [%g, %g] dB, skf %g .. %g\n", e.what(),
                 e.bracket_lo_db, e.bracket_hi_db, e.skf_at_lo, e.skf_at_hi);
    return 3;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
