#include "loopqr/mc_oracle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "loopqr/rng.hpp"

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

constexpr std::uint64_t kChunk = 1ull << 16;

// Fixed-size chunks, each with its own derived RNG stream, reduced in chunk
// order: estimates are bit-identical for any thread count.
template <class PerSample>
McEstimate reduce_chunks(const McSettings& settings, PerSample&& sample) {
  const std::uint64_t total = settings.samples;
  if (total < 1) throw std::domain_error("mc: samples must be >= 1");
  const std::uint64_t n_chunks = (total + kChunk - 1) / kChunk;
  std::vector<double> sums(n_chunks, 0.0), sq_sums(n_chunks, 0.0);

  std::atomic<std::uint64_t> cursor{0};
  // `sample` is captured by value: every std::thread copy-constructs the
  // worker, so functors with internal scratch state stay thread-local.
  auto worker = [&sums, &sq_sums, &cursor, &settings, total, n_chunks, sample]() mutable {
    for (;;) {
      const std::uint64_t c = cursor.fetch_add(1, std::memory_order_relaxed);
      if (c >= n_chunks) return;
      rng::SplitMix64 gen(rng::stream_seed(settings.seed, c));
      const std::uint64_t count = std::min(kChunk, total - c * kChunk);
      double s = 0.0, s2 = 0.0;
      for (std::uint64_t i = 0; i < count; ++i) {
        const double v = sample(gen);
        s += v;
        s2 += v * v;
      }
      sums[c] = s;
      sq_sums[c] = s2;
    }
  };

  const int n_threads = std::max(1, std::min<int>(resolve_threads(settings.threads),
                                                  static_cast<int>(n_chunks)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  double s = 0.0, s2 = 0.0;
  for (std::uint64_t c = 0; c < n_chunks; ++c) {
    s += sums[c];
    s2 += sq_sums[c];
  }
  const double nd = static_cast<double>(total);
  const double mean = s / nd;
  double se = 0.0;
  if (total > 1) {
    const double m2 = std::max(0.0, s2 - s * mean);  // sum (v - mean)^2
    se = std::sqrt(m2 / (nd - 1.0) / nd);
  }
  return {mean, se, total};
}

// Geometric with support k >= 1 by inverse CDF; uniform01 never returns the
// endpoints, so the log is finite.
long long sample_geometric(rng::SplitMix64& gen, double q, double inv_ln_q) {
  if (q <= 0.0) return 1;
  const double k = std::ceil(std::log(gen.uniform01()) * inv_ln_q);
  return k < 1.0 ? 1 : static_cast<long long>(k);
}

long long sample_binomial_inversion(rng::SplitMix64& gen, long long trials, double p) {
  double u = gen.uniform01();
  double pmf = std::exp(static_cast<double>(trials) * std::log1p(-p));
  double cum = pmf;
  const double ratio = p / (1.0 - p);
  long long k = 0;
  while (u > cum && k < trials) {
    ++k;
    pmf *= ratio * static_cast<double>(trials - k + 1) / static_cast<double>(k);
    cum += pmf;
  }
  return k;
}

// Parity of Binomial(trials, p).  Per-event coins below 1e3 trials; above
// that, counts via inversion sampling, split into pieces small enough that
// the starting pmf (1-p)^piece never underflows.  Parity of a sum is the
// XOR of piece parities, so the split is exact.
bool sample_parity(rng::SplitMix64& gen, long long trials, double p) {
  if (trials <= 0 || p <= 0.0) return false;
  if (p >= 1.0) return trials & 1;
  if (trials < 1000) {
    bool odd = false;
    for (long long i = 0; i < trials; ++i) odd ^= (gen.uniform01() < p);
    return odd;
  }
  const double log_q = std::log1p(-p);
  long long piece_max = static_cast<long long>(std::floor(600.0 / -log_q));
  if (piece_max < 1) piece_max = 1;
  bool odd = false;
  long long left = trials;
  while (left > 0) {
    const long long piece = std::min(left, piece_max);
    odd ^= static_cast<bool>(sample_binomial_inversion(gen, piece, p) & 1);
    left -= piece;
  }
  return odd;
}

void check_common(double q, int n, const char* who) {
  if (!(q >= 0.0 && q < 1.0))
    throw std::domain_error(std::string(who) + ": q must lie in [0, 1)");
  if (n < 1) throw std::domain_error(std::string(who) + ": n must be >= 1");
}

// D_n under either dependence model.
long long sample_dsum(rng::SplitMix64& gen, int n, double q, double inv_ln_q,
                      DependenceModel model, std::vector<long long>& scratch) {
  long long d = 0;
  if (model == DependenceModel::independent_pairs) {
    for (int i = 0; i < n - 1; ++i) {
      const long long n1 = sample_geometric(gen, q, inv_ln_q);
      const long long n2 = sample_geometric(gen, q, inv_ln_q);
      d += std::llabs(n1 - n2);
    }
  } else {
    scratch.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) scratch[static_cast<size_t>(i)] = sample_geometric(gen, q, inv_ln_q);
    for (int i = 0; i + 1 < n; ++i)
      d += std::llabs(scratch[static_cast<size_t>(i)] - scratch[static_cast<size_t>(i + 1)]);
  }
  return d;
}

}  // namespace

McEstimate mc_expect_pow_dsum(double a, double q, int n, const McSettings& settings) {
  if (!(a >= 0.0 && a <= 1.0))
    throw std::domain_error("mc_expect_pow_dsum: a must lie in [0, 1]");
  check_common(q, n, "mc_expect_pow_dsum");
  const double inv_ln_q = q > 0.0 ? 1.0 / std::log(q) : 0.0;
  return reduce_chunks(settings, [&, scratch = std::vector<long long>{}](rng::SplitMix64& gen) mutable {
    const long long d = sample_dsum(gen, n, q, inv_ln_q, settings.model, scratch);
    return std::pow(a, static_cast<double>(d));
  });
}

McEstimate mc_raw_rate(int n, double p, double tau0_s, const McSettings& settings) {
  if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("mc_raw_rate: p must lie in (0, 1]");
  if (!(tau0_s > 0.0)) throw std::domain_error("mc_raw_rate: tau0 must be positive");
  if (n < 1) throw std::domain_error("mc_raw_rate: n must be >= 1");
  const double q = 1.0 - p;
  const double inv_ln_q = q > 0.0 ? 1.0 / std::log(q) : 0.0;
  const McEstimate slots = reduce_chunks(settings, [&](rng::SplitMix64& gen) {
    long long worst = 1;
    for (int i = 0; i < n; ++i) worst = std::max(worst, sample_geometric(gen, q, inv_ln_q));
    return static_cast<double>(worst);
  });
  const double mean_rate = 1.0 / (tau0_s * slots.mean);
  const double se_rate = slots.std_error / (tau0_s * slots.mean * slots.mean);
  return {mean_rate, se_rate, slots.samples};
}

McEstimate mc_qber(const GkpElementaryProbs& probs, int n, long long m, double q,
                   CodeLevel level, StategenMode mode, const McSettings& settings) {
  check_common(q, n, "mc_qber");
  if (m < 1) throw std::domain_error("mc_qber: m must be >= 1");

  // Mirror the analytic path's probability mapping; the sampling below is
  // what stays independent of it.
  double pc = probs.p_corr, ps = probs.p_swap, pg = 0.0;
  bool with_stategen = false;
  if (level == CodeLevel::steane) {
    pc = steane_transfer_error(probs.p_corr);
    ps = steane_transfer_error(probs.p_swap);
    pg = mode == StategenMode::transferred ? steane_transfer_error(probs.p_stategen)
                                           : probs.p_stategen;
    with_stategen = true;
  }

  const double inv_ln_q = q > 0.0 ? 1.0 / std::log(q) : 0.0;
  return reduce_chunks(settings, [&, scratch = std::vector<long long>{}](rng::SplitMix64& gen) mutable {
    const long long d = sample_dsum(gen, n, q, inv_ln_q, settings.model, scratch);
    const long long events = m * d + 2 * m * (n - 1);
    bool odd = sample_parity(gen, events, pc);
    odd ^= sample_parity(gen, n - 1, ps);
    if (with_stategen) odd ^= sample_parity(gen, events + 2 * (n - 1), pg);
    return odd ? 1.0 : 0.0;
  });
}

}  // namespace loopqr
