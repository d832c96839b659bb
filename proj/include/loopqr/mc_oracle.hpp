#pragma once

// Monte Carlo oracles for the analytic pipeline.  Each estimator samples the
// underlying random process directly, with none of the closed forms in the
// loop, so agreement is evidence and disagreement is a bug (or, for the
// chain dependence model, a measured approximation gap).

#include <cstdint>

#include "loopqr/code_gkp.hpp"

namespace loopqr {

// The closed forms treat the n-1 station waiting times as independent
// (independent_pairs); in the physical chain adjacent stations share a
// segment's attempt count (chain).  The estimators can run either.
enum class DependenceModel { independent_pairs, chain };

struct McSettings {
  std::uint64_t samples = 1000000;
  std::uint64_t seed = 1;
  DependenceModel model = DependenceModel::independent_pairs;
  int threads = 0;  // 0: LOOPQR_THREADS env var, else hardware concurrency
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

// E(a^{D_n}) sampled from raw geometric draws.
McEstimate mc_expect_pow_dsum(double a, double q, int n, const McSettings& settings);

// Raw rate from the sampled mean of max(N_1..N_n); the standard error is
// propagated through x -> 1/(tau0 x) (delta method).
McEstimate mc_raw_rate(int n, double p, double tau0_s, const McSettings& settings);

// Which code's error accounting to sample in mc_qber.
enum class CodeLevel { gkp, steane };

// QBER by direct parity sampling: draw the waiting total D_n under
// settings.model, form the event counts M_n = m D_n + 2m(n-1) (plus
// M_n + 2(n-1) state generations for Steane), flip each family's coins, and
// report the odd-parity frequency.
McEstimate mc_qber(const GkpElementaryProbs& probs, int n, long long m, double q,
                   CodeLevel level, StategenMode mode, const McSettings& settings);

}  // namespace loopqr
