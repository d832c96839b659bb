#include "loopqr/code_gkp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "loopqr/gauss_noise.hpp"
#include "loopqr/geom_stats.hpp"

namespace loopqr {

namespace {

void check_prob(double p, const char* who) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::domain_error(std::string(who) + ": probability outside [0, 1]");
}

void check_chain_args(int n, long long m, double q, const char* who) {
  if (n < 1) throw std::domain_error(std::string(who) + ": n must be >= 1");
  if (m < 1) throw std::domain_error(std::string(who) + ": m must be >= 1");
  if (!(q >= 0.0 && q < 1.0))
    throw std::domain_error(std::string(who) + ": q must lie in [0, 1)");
}

// ln|1 - 2p| with its sign.  Transferred error probabilities can exceed 1/2,
// so the sign has to be carried; log1p keeps precision near p = 0.
std::pair<double, int> log_abs_1m2p(double p) {
  if (p < 0.5) return {std::log1p(-2.0 * p), +1};
  if (p > 0.5) return {std::log(2.0 * p - 1.0), -1};
  return {-std::numeric_limits<double>::infinity(), +1};
}

// Shared closed form.  Error families entering here are already at the level
// used in the parity count (i.e. post-transfer for Steane).  with_stategen
// adds the 2(m+1)(n-1) fixed events and the m-per-waiting-slot events of the
// state-generation family.
//
//   p_odd(corr side) = (1 - F) / 2  with
//   F = (1-2pc)^(2m(n-1)) [(1-2pg)^(2(m+1)(n-1))]
//       * [ ((1-q)/(1+q)) ((1+q Pi)/(1-q Pi)) ]^(n-1),   Pi = (1-2pc)^m [(1-2pg)^m]
//
// combined with the swap-parity term by the XOR rule
// eps = x(1-y) + y(1-x).  Everything is assembled in log space so m n ~ 1e6
// neither underflows nor loses the 1-F cancellation (expm1).
double qber_closed(double pc, double ps, double pg, bool with_stategen, int n, long long m,
                   double q) {
  if (n == 1) return 0.0;  // no stations: nothing stored, nothing swapped
  const double nm1 = static_cast<double>(n - 1);
  const double md = static_cast<double>(m);

  const auto [lc, sc] = log_abs_1m2p(pc);
  double log_abs_pi = md * lc;
  int sign_pi = (sc < 0 && (m & 1)) ? -1 : +1;
  double lam = 2.0 * md * nm1 * lc;  // even exponent: sign drops
  if (with_stategen) {
    const auto [lg, sg] = log_abs_1m2p(pg);
    log_abs_pi += md * lg;
    if (sg < 0 && (m & 1)) sign_pi = -sign_pi;
    lam += 2.0 * (md + 1.0) * nm1 * lg;
  }
  const double pi = sign_pi * std::exp(log_abs_pi);  // |pi| <= 1
  lam += nm1 * (std::log1p(-q) - std::log1p(q) + std::log1p(q * pi) - std::log1p(-q * pi));
  const double p_odd_corr = -std::expm1(lam) / 2.0;

  const auto [ls, ss] = log_abs_1m2p(ps);
  double p_odd_swap;
  if (ss > 0 || (n - 1) % 2 == 0) {
    p_odd_swap = -std::expm1(nm1 * ls) / 2.0;
  } else {
    p_odd_swap = (1.0 + std::exp(nm1 * ls)) / 2.0;
  }

  return p_odd_corr * (1.0 - p_odd_swap) + p_odd_swap * (1.0 - p_odd_corr);
}

// Convolution cross-check path: build the per-station error distribution by
// explicit parity-pair products, take the waiting-time mixture term by term,
// then chain the n-1 stations and swaps.  The arithmetic runs in long double:
// the dual-path comparison is held to 1e-12, which a ~10^3-step double
// convolution cannot clear on its own rounding noise.
double qber_convolved(double pc, double ps, double pg, bool with_stategen, int n, long long m,
                      double q) {
  if (n == 1) return 0.0;

  struct LPair {
    long double ok, err;
  };
  const auto conv = [](const LPair& a, const LPair& b) {
    return LPair{a.ok * b.ok + a.err * b.err, a.ok * b.err + a.err * b.ok};
  };
  const auto conv_pow = [&conv](LPair a, long long k) {
    LPair r{1.0L, 0.0L};
    while (k > 0) {
      if (k & 1) r = conv(r, a);
      a = conv(a, a);
      k >>= 1;
    }
    return r;
  };

  const LPair corr{1.0L - static_cast<long double>(pc), pc};
  const LPair swap{1.0L - static_cast<long double>(ps), ps};
  const LPair sgen{1.0L - static_cast<long double>(pg), pg};

  // Fixed per-station block: 2m corrections (+ 2(m+1) state generations).
  LPair station = conv_pow(corr, 2 * m);
  // Per waiting slot: m corrections (+ m state generations).
  LPair per_slot = conv_pow(corr, m);
  if (with_stategen) {
    station = conv(station, conv_pow(sgen, 2 * (m + 1)));
    per_slot = conv(per_slot, conv_pow(sgen, m));
  }

  // Mixture over the waiting-time PMF, truncated where the tail stops
  // mattering at the 1e-12 comparison level.
  long long k_max = 0;
  if (q > 0.0) {
    while (wait_pmf_tail(k_max, q) >= 1e-17 && k_max < 100000000) ++k_max;
  }
  const long double ql = q;
  const long double pl = 1.0L - ql;
  const long double denom = 1.0L - ql * ql;
  LPair wait_mix{0.0L, 0.0L};
  LPair running{1.0L, 0.0L};  // per_slot^k
  long double qk = 1.0L;      // q^k
  long double mass = 0.0L;
  for (long long k = 0; k <= k_max; ++k) {
    const long double w = (k == 0 ? 1.0L : 2.0L) * pl * pl * qk / denom;
    wait_mix.ok += w * running.ok;
    wait_mix.err += w * running.err;
    mass += w;
    qk *= ql;
    running = conv(running, per_slot);
  }
  // Put the unreached tail mass on the running distribution (bounded error).
  const long double tail = 1.0L - mass;
  wait_mix.ok += tail * running.ok;
  wait_mix.err += tail * running.err;

  const LPair per_station = conv(station, wait_mix);
  LPair chain = conv_pow(per_station, n - 1);
  chain = conv(chain, conv_pow(swap, n - 1));
  return static_cast<double>(chain.err);
}

}  // namespace

PauliPair PauliPair::from_error_prob(double p) {
  check_prob(p, "PauliPair");
  return {1.0 - p, p};
}

bool PauliPair::valid(double tol) const {
  return no_error >= 0.0 && error >= 0.0 && std::abs(no_error + error - 1.0) <= tol;
}

PauliPair convolve_pauli(const PauliPair& a, const PauliPair& b) {
  return {a.no_error * b.no_error + a.error * b.error,
          a.no_error * b.error + a.error * b.no_error};
}

PauliPair convolve_pauli_pow(const PauliPair& a, long long k) {
  if (k < 0) throw std::domain_error("convolve_pauli_pow: negative power");
  PauliPair result{1.0, 0.0};
  PauliPair base = a;
  while (k > 0) {
    if (k & 1) result = convolve_pauli(result, base);
    base = convolve_pauli(base, base);
    k >>= 1;
  }
  return result;
}

GkpElementaryProbs gkp_elementary_probs(double delta2, double eta_loop) {
  if (!(delta2 >= 0.0)) throw std::domain_error("gkp_elementary_probs: delta2 must be >= 0");
  if (!(eta_loop >= 0.0 && eta_loop <= 1.0))
    throw std::domain_error("gkp_elementary_probs: eta_loop must lie in [0, 1]");
  const double sigma2_corr = loss_to_shift_variance(eta_loop) + 2.0 * delta2;
  const double sigma2_lossless = 2.0 * delta2;
  const double p_lossless = stripe_error_prob(sigma2_lossless);
  return {stripe_error_prob(sigma2_corr), p_lossless, p_lossless};
}

double steane_transfer(double q_gkp) {
  check_prob(q_gkp, "steane_transfer");
  // q^7 + 7 q^6 (1-q) = q^6 (7 - 6q)
  const double q6 = q_gkp * q_gkp * q_gkp * q_gkp * q_gkp * q_gkp;
  return q6 * (7.0 - 6.0 * q_gkp);
}

double steane_transfer_error(double p) {
  check_prob(p, "steane_transfer_error");
  // 1 - (1-p)^6 (1 + 6p), kept in expm1/log1p form: exact 0 at p = 0 and no
  // 1-(1-x) rounding for small p.
  if (p == 1.0) return 1.0;
  return -std::expm1(6.0 * std::log1p(-p) + std::log1p(6.0 * p));
}

double qber_gkp(const GkpElementaryProbs& probs, int n, long long m, double q) {
  check_prob(probs.p_corr, "qber_gkp");
  check_prob(probs.p_swap, "qber_gkp");
  check_chain_args(n, m, q, "qber_gkp");
  return qber_closed(probs.p_corr, probs.p_swap, 0.0, false, n, m, q);
}

double qber_steane(const GkpElementaryProbs& probs, int n, long long m, double q,
                   StategenMode mode) {
  check_prob(probs.p_corr, "qber_steane");
  check_prob(probs.p_swap, "qber_steane");
  check_prob(probs.p_stategen, "qber_steane");
  check_chain_args(n, m, q, "qber_steane");
  const double pc = steane_transfer_error(probs.p_corr);
  const double ps = steane_transfer_error(probs.p_swap);
  const double pg = mode == StategenMode::transferred ? steane_transfer_error(probs.p_stategen)
                                                      : probs.p_stategen;
  return qber_closed(pc, ps, pg, true, n, m, q);
}

double qber_gkp_convolved(const GkpElementaryProbs& probs, int n, long long m, double q) {
  check_prob(probs.p_corr, "qber_gkp_convolved");
  check_prob(probs.p_swap, "qber_gkp_convolved");
  check_chain_args(n, m, q, "qber_gkp_convolved");
  return qber_convolved(probs.p_corr, probs.p_swap, 0.0, false, n, m, q);
}

double qber_steane_convolved(const GkpElementaryProbs& probs, int n, long long m, double q,
                             StategenMode mode) {
  check_prob(probs.p_corr, "qber_steane_convolved");
  check_prob(probs.p_swap, "qber_steane_convolved");
  check_prob(probs.p_stategen, "qber_steane_convolved");
  check_chain_args(n, m, q, "qber_steane_convolved");
  const double pc = steane_transfer_error(probs.p_corr);
  const double ps = steane_transfer_error(probs.p_swap);
  const double pg = mode == StategenMode::transferred ? steane_transfer_error(probs.p_stategen)
                                                      : probs.p_stategen;
  return qber_convolved(pc, ps, pg, true, n, m, q);
}

double skf_gkp(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 0.5))
    throw std::domain_error("skf_gkp: epsilon must lie in [0, 1/2]");
  const double r = 1.0 - 2.0 * binary_entropy(epsilon);
  return r > 0.0 ? r : 0.0;
}

}  // namespace loopqr
