#include "loopqr/geom_stats.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace loopqr {

namespace {

void check_q(double q, const char* who) {
  if (!(q >= 0.0 && q < 1.0))
    throw std::domain_error(std::string(who) + ": q must lie in [0, 1)");
}

double harmonic(int n) {
  double h = 0.0;
  for (int i = n; i >= 1; --i) h += 1.0 / i;  // small-to-large, keeps rounding tight
  return h;
}

}  // namespace

GeomParams::GeomParams(double success_prob) : p(success_prob), q(1.0 - success_prob) {
  if (!(p > 0.0 && p <= 1.0))
    throw std::domain_error("GeomParams: p must lie in (0, 1]");
}

double wait_pmf(long long k, double q) {
  if (k < 0) throw std::domain_error("wait_pmf: k must be nonnegative");
  check_q(q, "wait_pmf");
  const double p = 1.0 - q;
  const double p0 = p * p / (1.0 - q * q);
  if (k == 0) return p0;
  return 2.0 * p0 * std::pow(q, static_cast<double>(k));
}

double wait_pmf_tail(long long k_max, double q) {
  if (k_max < 0) throw std::domain_error("wait_pmf_tail: k_max must be nonnegative");
  check_q(q, "wait_pmf_tail");
  if (q == 0.0) return 0.0;
  const double p = 1.0 - q;
  const double p0 = p * p / (1.0 - q * q);
  // sum_{k > k_max} 2 p0 q^k = 2 p0 q^(k_max+1) / (1-q)
  return 2.0 * p0 * std::pow(q, static_cast<double>(k_max + 1)) / (1.0 - q);
}

double expect_pow_wait(double a, double q) {
  if (!(a >= 0.0 && a <= 1.0))
    throw std::domain_error("expect_pow_wait: a must lie in [0, 1]");
  check_q(q, "expect_pow_wait");
  // Single fraction so that a = 1 gives numerator == denominator exactly.
  return ((1.0 - q) * (1.0 + a * q)) / ((1.0 + q) * (1.0 - a * q));
}

double expect_pow_dsum(double a, double q, int n) {
  if (n < 1) throw std::domain_error("expect_pow_dsum: n must be >= 1");
  if (n == 1) return 1.0;
  return std::pow(expect_pow_wait(a, q), static_cast<double>(n - 1));
}

// E[max of n geometrics] = sum_{k>=0} [1 - (1 - q^k)^n].
//
// The inclusion-exclusion sum over binomials cancels catastrophically once n
// is large (terms ~ C(n, n/2) against a result ~ H_n / p), so it is not used
// here.  Expanding each 1/(1-q^i) geometrically and swapping the summation
// order turns it into the series above, whose terms are all positive.  For
// very small lambda = -ln q the series is long but an exact rearrangement of
// the same sum via the Bernoulli expansion of 1/(1 - e^-x) collapses to
// H_n/lambda + 1/2: the odd-moment sums sum_i (-1)^(i+1) C(n,i) i^(2k-1)
// vanish for n > 2k-1, and the first surviving correction is O(lambda^3)
// even at n = 2.  Below lambda = 1e-3 that correction sits under 1e-13
// relative, so the closed form takes over there.
double expected_max_geometric(int n, double p) {
  if (n < 1) throw std::domain_error("expected_max_geometric: n must be >= 1");
  if (!(p > 0.0 && p <= 1.0))
    throw std::domain_error("expected_max_geometric: p must lie in (0, 1]");
  if (p == 1.0) return 1.0;
  if (n == 1) return 1.0 / p;

  const double lambda = -std::log1p(-p);
  if (lambda <= 1e-3) return harmonic(n) / lambda + 0.5;

  const double ln_q = -lambda;
  double sum = 1.0;  // k = 0 term is exactly 1
  double comp = 0.0;
  for (long long k = 1;; ++k) {
    const double qk = std::exp(static_cast<double>(k) * ln_q);
    const double term = -std::expm1(static_cast<double>(n) * std::log1p(-qk));
    if (term < sum * 1e-18) break;
    const double y = term - comp;  // Kahan
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double expected_max_geometric_alternating(int n, double p) {
  if (n < 1) throw std::domain_error("expected_max_geometric_alternating: n must be >= 1");
  if (!(p > 0.0 && p <= 1.0))
    throw std::domain_error("expected_max_geometric_alternating: p must lie in (0, 1]");
  const double ln_q = std::log1p(-p);
  const double lg_n = std::lgamma(static_cast<double>(n) + 1.0);
  double sum = 0.0, comp = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double log_binom = lg_n - std::lgamma(static_cast<double>(i) + 1.0) -
                             std::lgamma(static_cast<double>(n - i) + 1.0);
    const double denom = -std::expm1(static_cast<double>(i) * ln_q);  // 1 - q^i
    double term = std::exp(log_binom) / denom;
    if (i % 2 == 0) term = -term;
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double raw_rate(int n, double p, double tau0_s) {
  if (n < 1) throw std::domain_error("raw_rate: n must be >= 1");
  if (!(tau0_s > 0.0)) throw std::domain_error("raw_rate: tau0 must be positive");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("raw_rate: p must lie in [0, 1]");
  if (p == 0.0) return 0.0;  // never succeeds; the rate is zero, not an exception
  return 1.0 / (tau0_s * expected_max_geometric(n, p));
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("binary_entropy: x must lie in [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -(x * std::log2(x) + (1.0 - x) * std::log2(1.0 - x));
}

}  // namespace loopqr
