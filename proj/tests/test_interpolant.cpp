#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bridgelab/bridge_sample.hpp"
#include "bridgelab/rng.hpp"
#include "bridgelab/schedule.hpp"

using namespace bridgelab;

namespace {

ScheduleSpec unit_i2sb() { return make_i2sb_spec(triangular_beta_table(1.0)); }

double nadb_gamma_x(double alpha, double k, double t) {
  return nadb_coefficients(make_nadb_spec(alpha, k), t).gamma_x;
}

}  // namespace

TEST_CASE("triangular schedule matches its closed-form integral") {
  const ScheduleSpec spec = unit_i2sb();
  // beta(t) = 4 min(t, 1-t) integrates to 2t^2 below the midpoint and
  // 1 - 2(1-t)^2 above it.
  for (double t : {0.0, 1e-4, 0.01, 0.1, 0.25, 0.37, 0.5, 0.63, 0.8, 0.95, 0.999, 1.0}) {
    const double expect = t <= 0.5 ? 2.0 * t * t : 1.0 - 2.0 * (1.0 - t) * (1.0 - t);
    CHECK(spec.sigma2(t) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(spec.sigma2(t) + spec.sigma2_bar(t) ==
          doctest::Approx(spec.total_variance()).epsilon(1e-12));
  }
  CHECK(spec.total_variance() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("schedule integrals are exact at the endpoints and monotone between") {
  const ScheduleSpec spec = make_i2sb_spec(triangular_beta_table(0.140625));
  CHECK(spec.sigma2(0.0) == 0.0);
  CHECK(spec.sigma2_bar(1.0) == 0.0);
  CHECK(spec.sigma2(1.0) == spec.total_variance());
  CHECK(spec.sigma2_bar(0.0) == spec.total_variance());
  double prev = -1.0;
  for (int i = 0; i <= 200; ++i) {
    const double s2 = spec.sigma2(i / 200.0);
    CHECK(s2 >= prev);
    prev = s2;
  }
}

TEST_CASE("schedule validation rejects malformed tables") {
  CHECK_NOTHROW(validate(unit_i2sb()));
  CHECK_NOTHROW(validate(make_nadb_spec(0.4, 0.75)));
  CHECK_THROWS_AS(make_nadb_spec(0.0, 0.75), std::invalid_argument);
  CHECK_THROWS_AS(make_nadb_spec(1.0, 0.75), std::invalid_argument);
  CHECK_THROWS_AS(make_nadb_spec(0.4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_i2sb_spec({{0.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_i2sb_spec({{0.0, 1.0}, {0.5, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(make_i2sb_spec({{0.0, 0.0}, {0.5, -1.0}, {1.0, 0.0}}),
                  std::invalid_argument);
  // Interior-zero rate has no noise anywhere; validate refuses it.
  const ScheduleSpec flat = make_i2sb_spec({{0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}});
  CHECK_THROWS_AS(validate(flat), std::invalid_argument);
}

TEST_CASE("power helper is exact at zero and one") {
  CHECK(pow_alpha(0.0, 0.4) == 0.0);
  CHECK(pow_alpha(1.0, 0.4) == 1.0);
  CHECK(pow_alpha(0.25, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pow_alpha(2.0, 3.0) == doctest::Approx(8.0).epsilon(1e-14));
}

TEST_CASE("stochastic amplitudes vanish at both endpoints for every alpha") {
  for (double alpha : {0.3, 0.4, 0.5}) {
    const ScheduleSpec spec = make_nadb_spec(alpha, 0.75);
    CHECK(nadb_coefficients(spec, 0.0).gamma_x == 0.0);
    CHECK(nadb_coefficients(spec, 1.0).gamma_x == 0.0);
    CHECK(target_noise_coefficient(spec, 0.0) == 0.0);
    CHECK(target_noise_coefficient(spec, 1.0) == 0.0);
    for (int i = 1; i < 1000; ++i) {
      const double t = i / 1000.0;
      const double gx = nadb_coefficients(spec, t).gamma_x;
      const double gy = target_noise_coefficient(spec, t);
      CHECK(std::isfinite(gx));
      CHECK(std::isfinite(gy));
      CHECK(gx > 0.0);
      CHECK(gy > 0.0);
    }
  }
}

TEST_CASE("midpoint amplitudes match frozen values") {
  CHECK(nadb_gamma_x(0.4, 0.75, 0.5) == 0.1875);  // 0.75 * 0.25 is exact
  const ScheduleSpec spec = make_nadb_spec(0.4, 0.75);
  // 0.75 * 0.5^0.6 * 0.5, high-precision reference
  CHECK(target_noise_coefficient(spec, 0.5) ==
        doctest::Approx(0.24740773326991767).epsilon(1e-12));
}

TEST_CASE("symmetric schedule weights the endpoints equally at the midpoint") {
  const I2sbCoeffs c = i2sb_coefficients(unit_i2sb(), 0.5);
  CHECK(c.mean_w0 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c.mean_w1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c.noise == doctest::Approx(0.5).epsilon(1e-12));  // sqrt(tv) / 2 at tv = 1
}

TEST_CASE("input noise nearly gone while target noise dominates near t = 0") {
  const ScheduleSpec i2sb = unit_i2sb();
  const double t = 1e-4;
  const double input = input_noise_coefficient(i2sb, t);
  const double target = target_noise_coefficient(i2sb, t);
  // sqrt(2e-8 (1 - 2e-8)) and sqrt(1 - 2e-8), high-precision references
  CHECK(input == doctest::Approx(1.414213548230959e-4).epsilon(1e-10));
  CHECK(target == doctest::Approx(0.99999998999999995).epsilon(1e-12));
  CHECK(input < 0.01);
  CHECK(target > 0.99);
}

TEST_CASE("aligned bridge keeps the target-to-input noise ratio at t^-alpha") {
  for (double alpha : {0.3, 0.4, 0.5}) {
    const ScheduleSpec spec = make_nadb_spec(alpha, 0.75);
    for (double t : {1e-4, 1e-3, 0.01, 0.1, 0.5, 0.9, 0.999}) {
      const double ratio = target_noise_coefficient(spec, t) /
                           input_noise_coefficient(spec, t);
      CHECK(ratio == doctest::Approx(std::pow(t, -alpha)).epsilon(1e-9));
    }
  }
}

TEST_CASE("amplitude calibration matches the schedule peak") {
  // Peak input noise of the unit triangular schedule is 1/2, so the matched
  // amplitude is 2; scaling total variance by s scales the peak by sqrt(s).
  CHECK(calibrate_k(unit_i2sb()) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(calibrate_k(make_i2sb_spec(triangular_beta_table(0.140625))) ==
        doctest::Approx(0.75).epsilon(1e-12));
  ScheduleSpec flat = make_i2sb_spec({{0.0, 0.0}, {0.5, 0.0}, {1.0, 0.0}});
  CHECK_THROWS_AS(calibrate_k(flat), std::invalid_argument);
}

TEST_CASE("bridge draws hit the endpoints exactly") {
  const Vec x0 = {0.25, 1.5, -0.75};
  const Vec x1 = {2.0, -1.0, 0.5};
  const Vec xhat0 = {1.75, -0.5, 0.25};
  const Vec z = {0.3, -1.2, 0.7};
  for (const ScheduleSpec& spec : {make_nadb_spec(0.4, 0.75), unit_i2sb()}) {
    const BridgeSample at0 = make_bridge_sample(spec, 0.0, x0, x1, xhat0, z);
    const BridgeSample at1 = make_bridge_sample(spec, 1.0, x0, x1, xhat0, z);
    for (std::size_t i = 0; i < x0.size(); ++i) {
      CHECK(at0.xt[i] == x0[i]);
      CHECK(at1.xt[i] == xhat0[i]);
    }
  }
  // The aligned target is noise-free at both endpoints.
  const ScheduleSpec nadb = make_nadb_spec(0.4, 0.75);
  for (double t : {0.0, 1.0}) {
    const BridgeSample s = make_bridge_sample(nadb, t, x0, x1, xhat0, z);
    for (std::size_t i = 0; i < x0.size(); ++i) {
      CHECK(s.yt[i] == xhat0[i] - x0[i]);
    }
  }
}

TEST_CASE("input and target obey the shared reconstruction identity") {
  // xt == x0 + scale(t) * yt ties the two parameterizations together; it is
  // what predict_x0 inverts.
  CounterRng rng(7, 99);
  const ScheduleSpec nadb = make_nadb_spec(0.4, 0.75);
  const ScheduleSpec i2sb = unit_i2sb();
  for (int rep = 0; rep < 10000; ++rep) {
    const double t = rng.uniform();
    const Vec x0 = rng.normal_vec(4);
    const Vec x1 = rng.normal_vec(4);
    const Vec z = rng.normal_vec(4);
    for (const ScheduleSpec& spec : {nadb, i2sb}) {
      const double scale = spec.kind == BridgeKind::NADB
                               ? pow_alpha(t, spec.alpha)
                               : std::sqrt(spec.sigma2(t));
      const BridgeSample s = make_bridge_sample(spec, t, x0, x1, x1, z);
      for (std::size_t i = 0; i < x0.size(); ++i) {
        const double lhs = s.xt[i];
        const double rhs = x0[i] + scale * s.yt[i];
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
      }
    }
  }
}

TEST_CASE("exact residuals invert back to the clean vector") {
  CounterRng rng(11, 5);
  const ScheduleSpec nadb = make_nadb_spec(0.4, 0.75);
  const ScheduleSpec i2sb = unit_i2sb();
  for (int rep = 0; rep < 1000; ++rep) {
    const double t = rng.uniform(1e-4, 1.0);
    const Vec x0 = rng.normal_vec(3);
    const Vec x1 = rng.normal_vec(3);
    const Vec z = rng.normal_vec(3);
    for (const ScheduleSpec& spec : {nadb, i2sb}) {
      const double scale = spec.kind == BridgeKind::NADB
                               ? pow_alpha(t, spec.alpha)
                               : std::sqrt(spec.sigma2(t));
      REQUIRE(scale > 0.0);
      const BridgeSample s = make_bridge_sample(spec, t, x0, x1, x1, z);
      Vec eps(x0.size());
      for (std::size_t i = 0; i < eps.size(); ++i) eps[i] = (s.xt[i] - x0[i]) / scale;
      const Vec back = predict_x0(spec, t, s.xt, eps);
      for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i] == doctest::Approx(x0[i]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("x0 prediction rejects the undefined time") {
  const ScheduleSpec spec = make_nadb_spec(0.4, 0.75);
  const Vec x = {1.0};
  CHECK_THROWS_AS(predict_x0(spec, 0.0, x, x), std::domain_error);
  CHECK_THROWS_AS(predict_x0(spec, -0.1, x, x), std::domain_error);
  CHECK_THROWS_AS(predict_x0(spec, 1.5, x, x), std::domain_error);
  CHECK_THROWS_AS(predict_x0(spec, 0.5, x, Vec{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("coefficient queries reject the wrong bridge kind") {
  CHECK_THROWS_AS(nadb_coefficients(unit_i2sb(), 0.5), std::invalid_argument);
  CHECK_THROWS_AS(i2sb_coefficients(make_nadb_spec(0.4, 0.75), 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(i2sb_coefficients(unit_i2sb(), 1.5), std::domain_error);
}
