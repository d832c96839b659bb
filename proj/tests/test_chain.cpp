#include <cmath>
#include <string>
#include <variant>

#include <doctest.h>

#include "loopqr/chain.hpp"
#include "loopqr/errors.hpp"

using namespace loopqr;

namespace {

bool names_field(const ValidationError& e, const char* field) {
  return std::string(e.what()).find(field) != std::string::npos;
}

template <class Fn>
void expect_validation_error(Fn&& fn, const char* field) {
  try {
    fn();
    FAIL_CHECK("expected ValidationError naming " << field);
  } catch (const ValidationError& e) {
    CHECK_MESSAGE(names_field(e, field), e.what());
  }
}

}  // namespace

TEST_CASE("config validation names the offending field") {
  auto check = [](auto mutate, const char* field) {
    RepeaterConfig cfg;
    mutate(cfg);
    expect_validation_error([&] { cfg.validate(); }, field);
  };
  check([](RepeaterConfig& c) { c.L_km = 0.0; }, "L");
  check([](RepeaterConfig& c) { c.segments = 0; }, "segments");
  check([](RepeaterConfig& c) { c.loops = 0; }, "loops");
  check([](RepeaterConfig& c) { c.L_att_km = -1.0; }, "L_att");
  check([](RepeaterConfig& c) { c.c_fiber_mps = 0.0; }, "c_fiber");
  check([](RepeaterConfig& c) { c.p_link = 1.5; }, "p_link");
  check([](RepeaterConfig& c) { c.p_loop = 0.0; }, "p_loop");
  check([](RepeaterConfig& c) { c.p_bsm = -0.1; }, "p_bsm");
  CHECK_NOTHROW(RepeaterConfig{}.validate());
}

TEST_CASE("code validation") {
  CHECK_NOTHROW(validate_code(GkpCode{15.0}));
  CHECK_NOTHROW(validate_code(SteaneGkpCode{15.0, StategenMode::transferred}));
  CHECK_NOTHROW(validate_code(QpcCode{5, 21}));
  CHECK_THROWS_AS(validate_code(GkpCode{std::nan("")}), ValidationError);
  CHECK_THROWS_AS(validate_code(QpcCode{0, 3}), ValidationError);
}

TEST_CASE("derive_link formulas") {
  RepeaterConfig cfg;  // defaults: L=1000, n=10, m=100
  const DerivedLink link = derive_link(cfg);
  CHECK(link.p == doctest::Approx(0.005202050533691669).epsilon(1e-14));
  CHECK_EQ(link.q, 1.0 - link.p);
  CHECK_EQ(link.tau0_s, 5e-4);  // 100 km / 2e8 m/s, exact in binary
  CHECK(link.eta_loop == doctest::Approx(0.99 * std::exp(-100.0 / (100.0 * 22.0))).epsilon(1e-15));
  CHECK(link.eta_total == doctest::Approx(std::exp(-1000.0 / 22.0)).epsilon(1e-14));

  cfg.segments = 20;
  cfg.loops = 50;
  const DerivedLink l2 = derive_link(cfg);
  CHECK(l2.eta_loop == doctest::Approx(0.99 * std::exp(-50.0 / (50.0 * 22.0))).epsilon(1e-15));

  // Short-segment limit: p -> p_bsm * p_link^2.
  cfg.segments = 1000000;
  cfg.loops = 1;
  const DerivedLink l3 = derive_link(cfg);
  CHECK(l3.p == doctest::Approx(0.5 * 0.99 * 0.99).epsilon(1e-4));
}

TEST_CASE("memory coherence identity with defaults") {
  const RepeaterConfig cfg;
  // 22 km / (2e8 m/s): the correctly rounded quotient is the double nearest
  // 1.1e-4, i.e. exactly the literal.
  CHECK_EQ(cfg.L_att_km * 1000.0 / cfg.c_fiber_mps, 1.1e-4);
}

TEST_CASE("derive_link is pure and bit-stable") {
  RepeaterConfig cfg;
  cfg.L_km = 8317.0;
  cfg.segments = 83;
  cfg.loops = 977;
  const DerivedLink a = derive_link(cfg);
  const DerivedLink b = derive_link(cfg);
  CHECK_EQ(a.p, b.p);
  CHECK_EQ(a.q, b.q);
  CHECK_EQ(a.eta_loop, b.eta_loop);
  CHECK_EQ(a.tau0_s, b.tau0_s);
  CHECK_EQ(a.eta_total, b.eta_total);
}

TEST_CASE("raw rate matches the reported operating points") {
  RepeaterConfig cfg;  // L=1000, n=10
  const RateBreakdown rb = secret_key_rate(cfg, GkpCode{18.0});
  CHECK(rb.raw_rate_hz == doctest::Approx(3.5582418371674).epsilon(1e-10));
  CHECK(rb.raw_rate_hz == doctest::Approx(3.5).epsilon(0.05));

  cfg.L_km = 10000.0;
  cfg.segments = 100;
  const RateBreakdown rb2 = secret_key_rate(cfg, GkpCode{18.0});
  CHECK(rb2.raw_rate_hz == doctest::Approx(2.0).epsilon(0.10));
}

TEST_CASE("raw rate is code independent") {
  RepeaterConfig cfg;
  cfg.L_km = 2000.0;
  cfg.segments = 40;
  cfg.loops = 60;
  const double r_gkp = secret_key_rate(cfg, GkpCode{16.0}).raw_rate_hz;
  const double r_steane = secret_key_rate(cfg, SteaneGkpCode{16.0}).raw_rate_hz;
  const double r_qpc = secret_key_rate(cfg, QpcCode{5, 21}).raw_rate_hz;
  CHECK_EQ(r_gkp, r_steane);
  CHECK_EQ(r_gkp, r_qpc);
}

TEST_CASE("single segment gives r = 1 for every family") {
  RepeaterConfig cfg;
  cfg.L_km = 50.0;
  cfg.segments = 1;
  cfg.loops = 3;
  for (const CodeSpec& code :
       {CodeSpec(GkpCode{12.0}), CodeSpec(SteaneGkpCode{12.0}), CodeSpec(QpcCode{4, 8})}) {
    const RateBreakdown rb = secret_key_rate(cfg, code);
    CHECK_EQ(rb.skf, 1.0);
    CHECK_EQ(rb.epsilon, 0.0);
    CHECK_EQ(rb.skr_hz, rb.raw_rate_hz);
  }
}

TEST_CASE("noiseless limit gives r = 1, S = R") {
  RepeaterConfig cfg;  // high squeezing + negligible loop loss
  cfg.loops = 1000000000LL;
  cfg.p_loop = 1.0;
  const RateBreakdown rb = secret_key_rate(cfg, GkpCode{60.0});
  CHECK_EQ(rb.epsilon, 0.0);
  CHECK_EQ(rb.skf, 1.0);
  CHECK_EQ(rb.skr_hz, rb.raw_rate_hz);
}

TEST_CASE("S = r * R and family diagnostics") {
  RepeaterConfig cfg;
  cfg.L_km = 1000.0;
  cfg.segments = 20;
  cfg.loops = 200;

  const RateBreakdown gkp = secret_key_rate(cfg, SteaneGkpCode{15.0});
  CHECK(gkp.skr_hz == doctest::Approx(gkp.skf * gkp.raw_rate_hz).epsilon(1e-12));
  CHECK(gkp.gkp_probs.has_value());
  CHECK_FALSE(gkp.qpc_teleport.has_value());
  CHECK(gkp.skf >= 0.0);
  CHECK(gkp.skf <= 1.0);

  const RateBreakdown qpc = secret_key_rate(cfg, QpcCode{5, 21});
  CHECK(qpc.skr_hz == doctest::Approx(qpc.skf * qpc.raw_rate_hz).epsilon(1e-12));
  CHECK_EQ(qpc.epsilon, 0.0);  // QPC contributes no Pauli errors
  CHECK(qpc.qpc_teleport.has_value());
  CHECK_FALSE(qpc.gkp_probs.has_value());
}

TEST_CASE("plob bound") {
  CHECK(plob_bound(0.5) == doctest::Approx(1.0).epsilon(1e-14));
  const double eta = 1e-9;
  CHECK(plob_bound(eta) == doctest::Approx(eta / std::log(2.0)).epsilon(1e-6));
  const double eta_1000 = std::exp(-1000.0 / 22.0);
  CHECK(plob_bound(eta_1000) ==
        doctest::Approx(-std::log2(1.0 - eta_1000)).epsilon(1e-12));
  CHECK_THROWS_AS(plob_bound(1.0), std::domain_error);
  CHECK_THROWS_AS(plob_bound(-0.1), std::domain_error);
}

TEST_CASE("unencoded storage bound") {
  RepeaterConfig cfg;
  cfg.L_km = 100.0;
  cfg.segments = 1;
  CHECK_EQ(unencoded_upper_bound(cfg), 1.0);
  cfg.segments = 2;
  CHECK(unencoded_upper_bound(cfg) == doctest::Approx(std::exp(-100.0 / 22.0)).epsilon(1e-14));
  cfg.segments = 3;
  CHECK(unencoded_upper_bound(cfg) ==
        doctest::Approx(std::exp(-(100.0 / 22.0) * 4.0 / 3.0)).epsilon(1e-14));
  for (int n : {3, 4, 10, 100}) {
    cfg.segments = n;
    CHECK(unencoded_upper_bound(cfg) < std::exp(-cfg.L_km / cfg.L_att_km));
  }
}
