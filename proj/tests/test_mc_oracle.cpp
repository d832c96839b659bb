#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include <doctest.h>

#include "loopqr/code_gkp.hpp"
#include "loopqr/geom_stats.hpp"
#include "loopqr/mc_oracle.hpp"

using namespace loopqr;

namespace {

double z_of(const McEstimate& est, double analytic) {
  if (est.std_error == 0.0) return est.mean == analytic ? 0.0 : INFINITY;
  return (est.mean - analytic) / est.std_error;
}

}  // namespace

TEST_CASE("deterministic replay and thread invariance") {
  McSettings s;
  s.samples = 200000;
  s.seed = 99;

  s.threads = 1;
  const McEstimate single = mc_expect_pow_dsum(0.97, 0.8, 6, s);
  s.threads = 8;
  const McEstimate pooled = mc_expect_pow_dsum(0.97, 0.8, 6, s);
  CHECK_EQ(single.mean, pooled.mean);  // bit-identical, chunk order fixed
  CHECK_EQ(single.std_error, pooled.std_error);

  const McEstimate again = mc_expect_pow_dsum(0.97, 0.8, 6, s);
  CHECK_EQ(pooled.mean, again.mean);

  s.seed = 100;
  const McEstimate other = mc_expect_pow_dsum(0.97, 0.8, 6, s);
  CHECK(other.mean != pooled.mean);
}

TEST_CASE("degenerate draws collapse exactly") {
  McSettings s;
  s.samples = 50000;
  s.seed = 5;
  const McEstimate q0 = mc_expect_pow_dsum(0.7, 0.0, 4, s);
  CHECK_EQ(q0.mean, 1.0);
  CHECK_EQ(q0.std_error, 0.0);

  const McEstimate a1 = mc_expect_pow_dsum(1.0, 0.85, 4, s);
  CHECK_EQ(a1.mean, 1.0);
  CHECK_EQ(a1.std_error, 0.0);

  const McEstimate sure = mc_raw_rate(2, 1.0, 1.0, s);
  CHECK_EQ(sure.mean, 1.0);
  CHECK_EQ(sure.std_error, 0.0);

  const McEstimate silent = mc_qber({0.0, 0.0, 0.0}, 5, 7, 0.9, CodeLevel::gkp,
                                    StategenMode::bare, s);
  CHECK_EQ(silent.mean, 0.0);
}

TEST_CASE("standard error scales as 1/sqrt(samples)") {
  McSettings s;
  s.seed = 31;
  s.samples = 100000;
  const McEstimate small = mc_expect_pow_dsum(0.9, 0.7, 5, s);
  s.samples = 400000;
  const McEstimate big = mc_expect_pow_dsum(0.9, 0.7, 5, s);
  const double ratio = small.std_error / big.std_error;
  CHECK(ratio > 2.0 * 0.8);
  CHECK(ratio < 2.0 * 1.2);
}

TEST_CASE("independent-pairs estimates match the closed forms") {
  McSettings s;
  s.samples = 200000;
  s.seed = 12345;

  CHECK(std::fabs(z_of(mc_expect_pow_dsum(0.99, 0.9, 5, s), expect_pow_dsum(0.99, 0.9, 5))) < 3.0);
  CHECK(std::fabs(z_of(mc_expect_pow_dsum(0.5, 0.2, 10, s), expect_pow_dsum(0.5, 0.2, 10))) < 3.0);
  CHECK(std::fabs(z_of(mc_raw_rate(10, 0.1, 5e-4, s), raw_rate(10, 0.1, 5e-4))) < 3.0);
  CHECK(std::fabs(z_of(mc_raw_rate(100, 0.005, 5e-4, s), raw_rate(100, 0.005, 5e-4))) < 3.0);

  const GkpElementaryProbs probs{1e-3, 1e-4, 1e-4};
  CHECK(std::fabs(z_of(mc_qber(probs, 5, 5, 0.9, CodeLevel::gkp, StategenMode::bare, s),
                       qber_gkp(probs, 5, 5, 0.9))) < 3.0);
  CHECK(std::fabs(z_of(mc_qber(probs, 10, 20, 0.99, CodeLevel::steane, StategenMode::transferred, s),
                       qber_steane(probs, 10, 20, 0.99, StategenMode::transferred))) < 3.0);
}

TEST_CASE("fully randomizing swap") {
  McSettings s;
  s.samples = 100000;
  s.seed = 8;
  const McEstimate est = mc_qber({0.0, 0.5, 0.0}, 2, 3, 0.5, CodeLevel::gkp,
                                 StategenMode::bare, s);
  CHECK(std::fabs(z_of(est, 0.5)) < 3.0);
}

TEST_CASE("aggregated binomial parity path agrees") {
  // q = 0 makes every event count deterministic: n=2, m=600 gives 1200
  // correction events per sample, which rides the binomial-inversion path.
  McSettings s;
  s.samples = 100000;
  s.seed = 77;
  const GkpElementaryProbs probs{2e-4, 0.0, 0.0};
  const McEstimate est = mc_qber(probs, 2, 600, 0.0, CodeLevel::gkp, StategenMode::bare, s);
  CHECK(std::fabs(z_of(est, qber_gkp(probs, 2, 600, 0.0))) < 3.0);
}

TEST_CASE("chain model exposes the independence gap") {
  McSettings s;
  s.samples = 400000;
  s.seed = 21;
  s.model = DependenceModel::chain;
  const McEstimate chain = mc_expect_pow_dsum(0.99, 0.9, 5, s);
  const double analytic = expect_pow_dsum(0.99, 0.9, 5);
  // Real, measurable gap: adjacent stations share a segment, which softens
  // the tail of D_n relative to independent pairs.
  CHECK(chain.mean > analytic);
  CHECK(z_of(chain, analytic) > 5.0);

  s.model = DependenceModel::independent_pairs;
  const McEstimate ind = mc_expect_pow_dsum(0.99, 0.9, 5, s);
  CHECK(std::fabs(z_of(ind, analytic)) < 3.0);
}

TEST_CASE("settings validation") {
  McSettings s;
  s.samples = 0;
  CHECK_THROWS_AS(mc_expect_pow_dsum(0.9, 0.5, 3, s), std::domain_error);
  s.samples = 10;
  CHECK_THROWS_AS(mc_expect_pow_dsum(1.5, 0.5, 3, s), std::domain_error);
  CHECK_THROWS_AS(mc_expect_pow_dsum(0.9, 1.0, 3, s), std::domain_error);
  CHECK_THROWS_AS(mc_raw_rate(3, 0.0, 1.0, s), std::domain_error);
  CHECK_THROWS_AS(mc_qber({0.1, 0.1, 0.1}, 3, 0, 0.5, CodeLevel::gkp, StategenMode::bare, s),
                  std::domain_error);
}

TEST_CASE("LOOPQR_THREADS env var is honored without changing results") {
  McSettings s;
  s.samples = 131072;  // exactly two chunks
  s.seed = 4;
  s.threads = 2;
  const McEstimate direct = mc_expect_pow_dsum(0.95, 0.6, 4, s);
  setenv("LOOPQR_THREADS", "2", 1);
  s.threads = 0;
  const McEstimate via_env = mc_expect_pow_dsum(0.95, 0.6, 4, s);
  unsetenv("LOOPQR_THREADS");
  CHECK_EQ(direct.mean, via_env.mean);
  CHECK_EQ(direct.std_error, via_env.std_error);
}
