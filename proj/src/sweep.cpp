#include "loopqr/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>

#include "loopqr/errors.hpp"

namespace loopqr {

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LOOPQR_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(std::min(hw, 16u)) : 1;
}

// Deterministic parallel map over [0, count): work items are pure and
// written to caller-indexed slots, so ordering never depends on scheduling.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const int n_threads =
      std::max(1, std::min<int>(resolve_threads(threads), static_cast<int>(count)));
  if (n_threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

CodeSpec with_squeezing(const CodeSpec& code, double s_db) {
  if (std::holds_alternative<GkpCode>(code)) return GkpCode{s_db};
  if (std::holds_alternative<SteaneGkpCode>(code))
    return SteaneGkpCode{s_db, std::get<SteaneGkpCode>(code).stategen};
  throw ValidationError("squeezing_threshold requires a gkp or steane-gkp code");
}

}  // namespace

OptimizeMResult optimize_m(RepeaterConfig config, const CodeSpec& code, MRange range) {
  if (range.lo < 1 || range.hi < range.lo)
    throw ValidationError("m range must satisfy 1 <= lo <= hi (got [" +
                          std::to_string(range.lo) + ", " + std::to_string(range.hi) + "])");

  OptimizeMResult out;
  out.m = 0;
  auto consider = [&](long long m) {
    config.loops = m;
    RateBreakdown r = secret_key_rate(config, code);
    if (out.m == 0 || r.skf > out.best.skf) {  // strict: ties keep the smaller m
      out.m = m;
      out.best = r;
    }
  };

  // Log-spaced probes, deduplicated (ascending keeps tie-breaking honest).
  constexpr int kProbes = 64;
  std::vector<long long> probes;
  probes.reserve(kProbes);
  const double ln_lo = std::log(static_cast<double>(range.lo));
  const double ln_hi = std::log(static_cast<double>(range.hi));
  for (int i = 0; i < kProbes; ++i) {
    const double t = kProbes == 1 ? 0.0 : static_cast<double>(i) / (kProbes - 1);
    auto m = static_cast<long long>(std::llround(std::exp(ln_lo + t * (ln_hi - ln_lo))));
    m = std::clamp(m, range.lo, range.hi);
    if (probes.empty() || m != probes.back()) probes.push_back(m);
  }
  for (const long long m : probes) consider(m);

  // Exhaustive refinement between the best probe's neighbors.
  const auto it = std::find(probes.begin(), probes.end(), out.m);
  const long long lo = it == probes.begin() ? range.lo : *(it - 1);
  const long long hi = (it + 1) == probes.end() ? range.hi : *(it + 1);
  for (long long m = lo; m <= hi; ++m) consider(m);

  return out;
}

std::vector<GridCell> scan_nm(const RepeaterConfig& base, const CodeSpec& code,
                              const std::vector<int>& n_values,
                              const std::vector<long long>& m_values, int threads) {
  if (n_values.empty() || m_values.empty())
    throw ValidationError("scan_nm: axis value lists must be nonempty");
  if (!std::is_sorted(n_values.begin(), n_values.end(), std::less_equal<>()))
    throw ValidationError("scan_nm: n_values must be strictly increasing");
  if (!std::is_sorted(m_values.begin(), m_values.end(), std::less_equal<>()))
    throw ValidationError("scan_nm: m_values must be strictly increasing");

  std::vector<GridCell> cells(n_values.size() * m_values.size());
  parallel_for(cells.size(), threads, [&](std::size_t idx) {
    RepeaterConfig cfg = base;
    cfg.segments = n_values[idx / m_values.size()];
    cfg.loops = m_values[idx % m_values.size()];
    cells[idx] = {cfg.segments, cfg.loops, secret_key_rate(cfg, code)};
  });
  return cells;
}

ThresholdResult squeezing_threshold(const RepeaterConfig& base, const CodeSpec& code,
                                    double target_skf, MRange m_range, double resolution_db) {
  if (!(resolution_db > 0.0)) throw ValidationError("resolution_db must be positive");
  constexpr double kLo = 5.0, kHi = 30.0;

  auto skf_at = [&](double s_db) {
    return optimize_m(base, with_squeezing(code, s_db), m_range).best.skf;
  };

  const double r_lo = skf_at(kLo);
  const double r_hi = skf_at(kHi);
  if (!(r_hi > target_skf))
    throw ThresholdError("squeezing target not achievable within [5, 30] dB", kLo, kHi, r_lo,
                         r_hi);
  if (r_lo > target_skf) return {kLo, kLo, kLo, target_skf};  // already achieved at the low end

  // SKF should be nondecreasing in s (less noise per event); spot-check it
  // rather than trusting it.
  const double r_mid = skf_at(0.5 * (kLo + kHi));
  if (r_mid + 1e-12 < r_lo || r_hi + 1e-12 < r_mid)
    throw std::logic_error("squeezing_threshold: SKF not monotone in squeezing");

  double lo = kLo, hi = kHi;
  while (hi - lo > resolution_db) {
    const double mid = 0.5 * (lo + hi);
    if (skf_at(mid) > target_skf)
      hi = mid;
    else
      lo = mid;
  }
  return {hi, lo, hi, target_skf};
}

std::vector<DistancePoint> distance_curve(const RepeaterConfig& base, const CodeSpec& code,
                                          const std::vector<double>& L_values_km, MRange m_range,
                                          int threads) {
  if (L_values_km.empty()) throw ValidationError("distance_curve: L_values must be nonempty");
  std::vector<DistancePoint> points(L_values_km.size());
  parallel_for(points.size(), threads, [&](std::size_t idx) {
    RepeaterConfig cfg = base;
    cfg.L_km = L_values_km[idx];
    const OptimizeMResult opt = optimize_m(cfg, code, m_range);
    points[idx] = {cfg.L_km, opt.m, opt.best};
  });
  return points;
}

QpcWidthResult optimize_qpc_width(const RepeaterConfig& base, int blocks, MRange m_range) {
  QpcWidthResult out;
  bool first = true;
  for (int a = 2; a <= 10; ++a) {
    const OptimizeMResult opt = optimize_m(base, QpcCode{a, blocks}, m_range);
    if (first || opt.best.skf > out.best.skf) {
      out = {a, opt.m, opt.best};
      first = false;
    }
  }
  return out;
}

}  // namespace loopqr
