#pragma once

// Parameter exploration on top of secret_key_rate: per-configuration m
// optimization, n-m grids, squeezing thresholds, and distance curves.

#include <stdexcept>
#include <vector>

#include "loopqr/chain.hpp"

namespace loopqr {

struct MRange {
  long long lo = 1;
  long long hi = 2000;
};

struct OptimizeMResult {
  long long m = 1;
  RateBreakdown best;
};

// Argmax of the SKF over m in [range.lo, range.hi]: 64 log-spaced probes,
// then an exhaustive pass between the neighbors of the best probe.  Ties go
// to the smaller m.
OptimizeMResult optimize_m(RepeaterConfig config, const CodeSpec& code, MRange range = {});

struct GridCell {
  int segments = 0;
  long long loops = 0;
  RateBreakdown result;
};

// Full n x m grid, row-major in the given axis order.  Cells are pure and
// evaluated in parallel; output order is fixed by the axes.
std::vector<GridCell> scan_nm(const RepeaterConfig& base, const CodeSpec& code,
                              const std::vector<int>& n_values,
                              const std::vector<long long>& m_values, int threads = 0);

struct ThresholdResult {
  double threshold_db = 0.0;   // smallest probed squeezing achieving the target
  double bracket_lo_db = 0.0;  // skf <= target here
  double bracket_hi_db = 0.0;  // skf > target here (== threshold_db)
  double target_skf = 0.0;
};

// Raised when the target is not achievable inside the search bracket.
class ThresholdError : public std::runtime_error {
 public:
  ThresholdError(const std::string& what, double lo_db, double hi_db, double skf_lo,
                 double skf_hi)
      : std::runtime_error(what), bracket_lo_db(lo_db), bracket_hi_db(hi_db), skf_at_lo(skf_lo),
        skf_at_hi(skf_hi) {}
  double bracket_lo_db, bracket_hi_db, skf_at_lo, skf_at_hi;
};

// Minimal squeezing (to resolution_db, bracket [5, 30] dB) for which the SKF
// exceeds target_skf, with m re-optimized at every probe.  `code` must be
// GkpCode or SteaneGkpCode; its squeezing field is overridden during the
// search.  SKF monotonicity in s is spot-checked, not assumed.
ThresholdResult squeezing_threshold(const RepeaterConfig& base, const CodeSpec& code,
                                    double target_skf = 0.0, MRange m_range = {},
                                    double resolution_db = 0.1);

struct DistancePoint {
  double L_km = 0.0;
  long long m = 1;
  RateBreakdown result;
};

// SKF over total distance with m optimized at each L.
std::vector<DistancePoint> distance_curve(const RepeaterConfig& base, const CodeSpec& code,
                                          const std::vector<double>& L_values_km,
                                          MRange m_range = {}, int threads = 0);

struct QpcWidthResult {
  int photons_per_block = 2;
  long long m = 1;
  RateBreakdown best;
};

// Best photons-per-block in [2, 10] for a fixed block count (m re-optimized
// per candidate).  The preferred a is an empirical result of this scan, not
// an input.
QpcWidthResult optimize_qpc_width(const RepeaterConfig& base, int blocks, MRange m_range = {});

}  // namespace loopqr
