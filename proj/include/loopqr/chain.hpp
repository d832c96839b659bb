#pragma once

// Repeater-chain assembly: external configuration, derived per-segment
// quantities, and the secret-key-rate composition S = r * R.

#include <optional>
#include <variant>

#include "loopqr/code_gkp.hpp"
#include "loopqr/code_qpc.hpp"

namespace loopqr {

// External knobs.  Distances in km, velocities in m/s; the km -> m conversion
// happens in exactly one place (derive_link).
struct RepeaterConfig {
  double L_km = 1000.0;       // total distance
  int segments = 10;          // n
  long long loops = 100;      // m, correction rounds per signaling period
  double L_att_km = 22.0;     // fiber attenuation length
  double c_fiber_mps = 2e8;   // signal velocity in fiber
  double p_link = 0.99;       // single-photon coupling efficiency
  double p_loop = 0.99;       // encoded-state loop coupling efficiency
  double p_bsm = 0.5;         // physical BSM success probability

  void validate() const;  // throws ValidationError naming the bad field
};

// Per-segment derived quantities; every field is a pure function of the
// config, so re-deriving after a serialization round trip is bit-identical.
struct DerivedLink {
  double p;          // distribution success probability per attempt
  double q;          // 1 - p
  double eta_loop;   // loop transmissivity per correction round
  double tau0_s;     // signaling period L0 / c
  double eta_total;  // end-to-end fiber transmissivity exp(-L/L_att)
};

DerivedLink derive_link(const RepeaterConfig& config);

struct GkpCode {
  double squeezing_db;
};
struct SteaneGkpCode {
  double squeezing_db;
  StategenMode stategen = StategenMode::bare;
};
struct QpcCode {
  int photons_per_block;
  int blocks;
};
using CodeSpec = std::variant<GkpCode, SteaneGkpCode, QpcCode>;

void validate_code(const CodeSpec& code);  // throws ValidationError

struct RateBreakdown {
  double raw_rate_hz = 0.0;  // R
  double skf = 0.0;          // r
  double skr_hz = 0.0;       // S = r * R
  double epsilon = 0.0;      // QBER; identically 0 for QPC
  // Diagnostics for whichever family ran:
  std::optional<GkpElementaryProbs> gkp_probs;
  std::optional<double> qpc_teleport;  // p_qpc at the loop transmissivity
};

RateBreakdown secret_key_rate(const RepeaterConfig& config, const CodeSpec& code);

// Repeaterless secret-key capacity of the pure-loss channel, -log2(1 - eta).
double plob_bound(double eta_total);

// What storing unencoded single photons in the loops would cost:
// exp(-L/L_att)^(2m(n-1)/(n m)) = exp(-(L/L_att) * 2(n-1)/n).  Only used for
// the motivating comparison against eta_total.
double unencoded_upper_bound(const RepeaterConfig& config);

}  // namespace loopqr
