#include "loopqr/code_qpc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "loopqr/errors.hpp"
#include "loopqr/geom_stats.hpp"

namespace loopqr {

namespace {

void check_eta(double eta, const char* who) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::domain_error(std::string(who) + ": eta must lie in [0, 1]");
}

// Exact-in-double multiplicative recurrence for modest n, log-gamma beyond
// (overflow-proof either way; the small-shape oracle comparisons stay exact).
double binom(long long n, long long k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  if (n > 60) {
    return std::exp(std::lgamma(static_cast<double>(n) + 1.0) -
                    std::lgamma(static_cast<double>(k) + 1.0) -
                    std::lgamma(static_cast<double>(n - k) + 1.0));
  }
  double r = 1.0;
  for (long long i = 1; i <= k; ++i)
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// W[i][mu]: sum over ways to spread mu losses across exactly i tagged blocks,
// each losing between 1 and a-1 photons, of the product of per-block pattern
// counts C(a, j_k).  Built by repeated convolution with the single-block
// count vector.
std::vector<std::vector<double>> loss_spread_counts(int a, int i_max, int mu_max) {
  std::vector<double> single(static_cast<size_t>(a), 0.0);  // index j in [1, a-1]
  for (int j = 1; j <= a - 1; ++j) single[static_cast<size_t>(j)] = binom(a, j);

  std::vector<std::vector<double>> w(static_cast<size_t>(i_max) + 1);
  w[0] = {1.0};
  for (int i = 1; i <= i_max; ++i) {
    const auto& prev = w[static_cast<size_t>(i - 1)];
    const int hi = std::min(mu_max, i * (a - 1));
    std::vector<double> next(static_cast<size_t>(hi) + 1, 0.0);
    for (size_t mu = 0; mu < prev.size(); ++mu) {
      if (prev[mu] == 0.0) continue;
      for (int j = 1; j <= a - 1; ++j) {
        const size_t target = mu + static_cast<size_t>(j);
        if (target > static_cast<size_t>(hi)) break;
        next[target] += prev[mu] * single[static_cast<size_t>(j)];
      }
    }
    w[static_cast<size_t>(i)] = std::move(next);
  }
  return w;
}

// sum_i (1 - 2^-(b-i)) C(b, i) W[i][mu]: number of loss patterns of weight mu
// compatible with success, weighted by the undetermined-block haircut.
double success_pattern_weight(const QpcShape& s, long long mu,
                              const std::vector<std::vector<double>>& w) {
  const int b = s.blocks;
  double total = 0.0;
  const long long i_hi = std::min<long long>(mu, b - 1);
  for (long long i = 0; i <= i_hi; ++i) {
    const auto& row = w[static_cast<size_t>(i)];
    if (static_cast<size_t>(mu) >= row.size() || row[static_cast<size_t>(mu)] == 0.0) continue;
    const double haircut = -std::expm1(-static_cast<double>(b - i) * std::numbers::ln2);
    total += haircut * binom(b, i) * row[static_cast<size_t>(mu)];
  }
  return total;
}

}  // namespace

void QpcShape::validate(int max_total_photons) const {
  if (photons_per_block < 1)
    throw ValidationError("photons_per_block must be >= 1 (got " +
                          std::to_string(photons_per_block) + ")");
  if (blocks < 1) throw ValidationError("blocks must be >= 1 (got " + std::to_string(blocks) + ")");
  if (static_cast<long long>(photons_per_block) * blocks > max_total_photons)
    throw ValidationError("total photons photons_per_block*blocks exceeds the limit of " +
                          std::to_string(max_total_photons));
}

double qpc_success_closed(const QpcShape& shape, double eta) {
  shape.validate();
  check_eta(eta, "qpc_success_closed");
  const double a = static_cast<double>(shape.photons_per_block);
  const int b = shape.blocks;
  // t1 = 1 - (1-eta)^a, half = eta^a / 2, t2 = t1 - half; the difference of
  // b-th powers is expanded as half * sum_j t1^j t2^(b-1-j).
  const double t1 = -std::expm1(a * std::log1p(-eta));
  const double half = 0.5 * std::pow(eta, a);
  const double t2 = t1 - half;
  double geom = 0.0;
  double t1_pow = 1.0;  // t1^j ascending while t2^(b-1-j) descends
  std::vector<double> t2_pow(static_cast<size_t>(b), 1.0);
  for (int j = 1; j < b; ++j) t2_pow[static_cast<size_t>(j)] = t2_pow[static_cast<size_t>(j - 1)] * t2;
  for (int j = 0; j < b; ++j) {
    geom += t1_pow * t2_pow[static_cast<size_t>(b - 1 - j)];
    t1_pow *= t1;
  }
  return half * geom;
}

double qpc_success_with_losses(const QpcShape& shape, long long mu) {
  shape.validate();
  const int a = shape.photons_per_block;
  const int b = shape.blocks;
  const long long total = static_cast<long long>(a) * b;
  if (mu < 0 || mu > total)
    throw std::domain_error("qpc_success_with_losses: mu outside [0, a*b]");
  const long long mu_max = static_cast<long long>(a - 1) * (b - 1);
  if (mu > mu_max) return 0.0;
  const auto w = loss_spread_counts(a, std::min<long long>(b - 1, mu), static_cast<int>(mu));
  return success_pattern_weight(shape, mu, w) / binom(total, mu);
}

double qpc_success_sum(const QpcShape& shape, double eta) {
  shape.validate();
  check_eta(eta, "qpc_success_sum");
  const int a = shape.photons_per_block;
  const int b = shape.blocks;
  const long long total = static_cast<long long>(a) * b;
  const long long mu_max = static_cast<long long>(a - 1) * (b - 1);
  const auto w = loss_spread_counts(a, b - 1, static_cast<int>(mu_max));
  // The 1/C(ab, mu) in the per-mu success probability cancels against the
  // C(ab, mu) of the loss-count binomial, so each pattern just carries
  // (1-eta)^mu eta^(ab-mu).
  double sum = 0.0;
  for (long long mu = 0; mu <= mu_max; ++mu) {
    const double weight = success_pattern_weight(shape, mu, w);
    if (weight == 0.0) continue;
    sum += weight * std::pow(1.0 - eta, static_cast<double>(mu)) *
           std::pow(eta, static_cast<double>(total - mu));
  }
  return sum;
}

double skf_qpc(const QpcShape& shape, int n, long long m, double q, double eta_loop) {
  shape.validate();
  check_eta(eta_loop, "skf_qpc");
  if (n < 1) throw std::domain_error("skf_qpc: n must be >= 1");
  if (m < 1) throw std::domain_error("skf_qpc: m must be >= 1");
  if (!(q >= 0.0 && q < 1.0)) throw std::domain_error("skf_qpc: q must lie in [0, 1)");
  if (n == 1) return 1.0;

  const double p_tel = qpc_success_closed(shape, eta_loop);
  if (p_tel <= 0.0) return 0.0;
  const double nm1 = static_cast<double>(n - 1);
  const double lp = std::log(p_tel);
  double log_r = nm1 * std::log1p(-std::exp2(-static_cast<double>(shape.blocks)));
  log_r += 2.0 * static_cast<double>(m) * nm1 * lp;
  const double a_m = std::exp(static_cast<double>(m) * lp);  // p_tel^m
  log_r += nm1 * std::log(expect_pow_wait(a_m, q));
  return std::exp(log_r);
}

}  // namespace loopqr
