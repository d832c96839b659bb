#include "loopqr/chain.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "loopqr/errors.hpp"
#include "loopqr/gauss_noise.hpp"
#include "loopqr/geom_stats.hpp"

namespace loopqr {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

void check_unit_interval(double v, const char* field) {
  require(v > 0.0 && v <= 1.0,
          std::string(field) + " must lie in (0, 1] (got " + std::to_string(v) + ")");
}

}  // namespace

void RepeaterConfig::validate() const {
  require(std::isfinite(L_km) && L_km > 0.0,
          "L_km must be positive (got " + std::to_string(L_km) + ")");
  require(segments >= 1, "segments must be >= 1 (got " + std::to_string(segments) + ")");
  require(loops >= 1, "loops must be >= 1 (got " + std::to_string(loops) + ")");
  require(std::isfinite(L_att_km) && L_att_km > 0.0,
          "L_att_km must be positive (got " + std::to_string(L_att_km) + ")");
  require(std::isfinite(c_fiber_mps) && c_fiber_mps > 0.0,
          "c_fiber_mps must be positive (got " + std::to_string(c_fiber_mps) + ")");
  check_unit_interval(p_link, "p_link");
  check_unit_interval(p_loop, "p_loop");
  check_unit_interval(p_bsm, "p_bsm");
}

DerivedLink derive_link(const RepeaterConfig& config) {
  config.validate();
  const double L0_km = config.L_km / config.segments;
  const double p = config.p_bsm * config.p_link * config.p_link * std::exp(-L0_km / config.L_att_km);
  const double eta_loop =
      config.p_loop * std::exp(-L0_km / (static_cast<double>(config.loops) * config.L_att_km));
  const double tau0_s = L0_km * 1000.0 / config.c_fiber_mps;  // the one km -> m conversion
  const double eta_total = std::exp(-config.L_km / config.L_att_km);
  return {p, 1.0 - p, eta_loop, tau0_s, eta_total};
}

void validate_code(const CodeSpec& code) {
  std::visit(
      [](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, GkpCode>) {
          if (!std::isfinite(c.squeezing_db)) throw ValidationError("squeezing_db must be finite");
        } else if constexpr (std::is_same_v<T, SteaneGkpCode>) {
          if (!std::isfinite(c.squeezing_db)) throw ValidationError("squeezing_db must be finite");
        } else {
          QpcShape{c.photons_per_block, c.blocks}.validate();
        }
      },
      code);
}

RateBreakdown secret_key_rate(const RepeaterConfig& config, const CodeSpec& code) {
  config.validate();
  validate_code(code);
  const DerivedLink link = derive_link(config);

  RateBreakdown out;
  out.raw_rate_hz = raw_rate(config.segments, link.p, link.tau0_s);

  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, GkpCode>) {
          const auto probs =
              gkp_elementary_probs(squeezing_to_variance(c.squeezing_db), link.eta_loop);
          out.epsilon = qber_gkp(probs, config.segments, config.loops, link.q);
          out.skf = skf_gkp(out.epsilon);
          out.gkp_probs = probs;
        } else if constexpr (std::is_same_v<T, SteaneGkpCode>) {
          const auto probs =
              gkp_elementary_probs(squeezing_to_variance(c.squeezing_db), link.eta_loop);
          out.epsilon = qber_steane(probs, config.segments, config.loops, link.q, c.stategen);
          out.skf = skf_gkp(out.epsilon);
          out.gkp_probs = probs;
        } else {
          const QpcShape shape{c.photons_per_block, c.blocks};
          out.epsilon = 0.0;  // teleportation introduces no Pauli errors
          out.skf = skf_qpc(shape, config.segments, config.loops, link.q, link.eta_loop);
          out.qpc_teleport = qpc_success_closed(shape, link.eta_loop);
        }
      },
      code);

  out.skr_hz = out.skf * out.raw_rate_hz;
  return out;
}

double plob_bound(double eta_total) {
  if (!(eta_total >= 0.0 && eta_total < 1.0))
    throw std::domain_error("plob_bound: eta must lie in [0, 1)");
  return -std::log1p(-eta_total) / std::numbers::ln2;
}

double unencoded_upper_bound(const RepeaterConfig& config) {
  config.validate();
  const double n = static_cast<double>(config.segments);
  return std::exp(-(config.L_km / config.L_att_km) * 2.0 * (n - 1.0) / n);
}

}  // namespace loopqr
