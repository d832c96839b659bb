#pragma once

// Statistics of geometrically distributed entanglement-distribution attempts.
// Every segment of the chain retries until success, so the per-segment attempt
// count N is geometric with support k >= 1 (the first attempt already costs
// one signaling period).  Everything downstream -- waiting-time differences,
// raw rates, exponential moments -- derives from that.

namespace loopqr {

// Success/failure probability pair of one distribution attempt.  q is always
// derived from p; there is deliberately no way to set it independently.
struct GeomParams {
  double p;  // success probability per attempt, 0 < p <= 1
  double q;  // failure probability, exactly 1 - p
  explicit GeomParams(double success_prob);
};

// PMF of W = |N1 - N2| for two i.i.d. geometric attempt counts:
//   P(W = 0) = p^2 / (1 - q^2),   P(W = k) = 2 p^2 q^k / (1 - q^2)  (k >= 1).
double wait_pmf(long long k, double q);

// Probability mass strictly beyond k_max: 2 p^2 q^(k_max+1) / ((1-q^2)(1-q)).
// Exposed so callers truncating the PMF can pick k_max against a target.
double wait_pmf_tail(long long k_max, double q);

// E(a^W) = ((1-q)(1+aq)) / ((1+q)(1-aq)) for a in [0, 1].
double expect_pow_wait(double a, double q);

// E(a^{D_n}) with D_n the total inter-segment waiting time, under the
// approximation that the n-1 station waits are independent:
// expect_pow_wait(a, q)^(n-1).  n = 1 has no stations and returns 1.
double expect_pow_dsum(double a, double q, int n);

// Expected number of signaling periods until all n segments have succeeded,
// i.e. E[max of n i.i.d. geometrics].  See the implementation notes on the
// evaluation strategy; relative error stays below 1e-8 for n <= 1000 and
// p >= 1e-4 (and far below that in the typical regime).
double expected_max_geometric(int n, double p);

// Literal inclusion-exclusion form sum_{i=1..n} (-1)^(i+1) C(n,i)/(1 - q^i),
// evaluated with log-domain binomials and compensated summation.  Suffers
// catastrophic cancellation for large n; kept as a small-n cross-check.
double expected_max_geometric_alternating(int n, double p);

// R = 1 / (tau0 * E[max of n geometrics]) in Hz.  p = 0 returns a rate of 0
// explicitly instead of dividing by an infinite expectation.
double raw_rate(int n, double p, double tau0_s);

// h(x) = -x log2 x - (1-x) log2(1-x), with h(0) = h(1) = 0 by limit.
double binary_entropy(double x);

}  // namespace loopqr
