#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "casimir/quadrature.hpp"
#include "test_util.hpp"

using namespace casimir;
using Catch::Approx;

TEST_CASE("separable analytic integral") {
  // int int e^{-u-v} v dv du = 1
  auto f = [](double u, double v) { return std::exp(-u - v); };
  const auto r = integrate2d(f, {});
  CHECK(r.value == Approx(1.0).epsilon(1e-9));
  CHECK(r.error_estimate < 1e-7);
  CHECK(r.evaluations > 0);
}

TEST_CASE("zero integrand gives exactly zero") {
  const auto r = integrate2d([](double, double) { return 0.0; }, {});
  CHECK(r.value == 0.0);
  CHECK(r.error_estimate == 0.0);
}

TEST_CASE("mirror-energy reference value") {
  // (1/4pi^2) int int ln(1 - e^{-2 sqrt(u^2+v^2)}) v dv du = -pi^2/1440
  auto f = [](double u, double v) {
    const double q = std::hypot(u, v);
    return q > 350.0 ? 0.0 : std::log1p(-std::exp(-2.0 * q));
  };
  const auto r = integrate2d(f, {});
  CHECK(r.value / (4.0 * pi * pi) == Approx(-pi * pi / 1440.0).epsilon(1e-8));

  SECTION("radial 1-D oracle agrees") {
    const double radial =
        test_util::radial_integral([](double q) { return std::log1p(-std::exp(-2.0 * q)); });
    CHECK(r.value == Approx(radial).epsilon(1e-8));
  }
}

TEST_CASE("radial symmetry property") {
  auto g = [](double q) { return std::exp(-1.7 * q) * (1.0 + q * q); };
  const auto r2d = integrate2d([&](double u, double v) { return g(std::hypot(u, v)); }, {});
  const double r1d = test_util::radial_integral(g, 80.0);
  CHECK(r2d.value == Approx(r1d).epsilon(1e-8));
}

TEST_CASE("determinism across repeated runs") {
  auto f = [](double u, double v) {
    const double q = std::hypot(u, v);
    return q > 350.0 ? 0.0 : std::log1p(-0.8 * std::exp(-2.0 * q));
  };
  const auto r1 = integrate2d(f, {});
  const auto r2 = integrate2d(f, {});
  CHECK(r1.value == r2.value);  // bit-identical
  CHECK(r1.error_estimate == r2.error_estimate);
  CHECK(r1.evaluations == r2.evaluations);
}

TEST_CASE("tightening the tolerance never raises the achieved error") {
  auto f = [](double u, double v) {
    const double q = std::hypot(u, v);
    return q > 350.0 ? 0.0 : std::log1p(-std::exp(-2.0 * q));
  };
  double prev = 1e300;
  for (double tol : {1e-4, 1e-5, 1e-6, 1e-7, 1e-8, 1e-9}) {
    quadrature_spec spec;
    spec.rel_tol = tol;
    const auto r = integrate2d(f, spec);
    CHECK(r.error_estimate <= prev);
    prev = r.error_estimate;
  }
}

TEST_CASE("rational map transform") {
  quadrature_spec spec;
  spec.transform = transform_kind::rational_map;
  auto f = [](double u, double v) { return std::exp(-u - v); };
  CHECK(integrate2d(f, spec).value == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("tanh-sinh base rule") {
  quadrature_spec spec;
  spec.base_rule = base_rule_kind::tanh_sinh;
  spec.level = 6;
  auto f = [](double u, double v) { return std::exp(-u - v); };
  CHECK(integrate2d(f, spec).value == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("gauss-legendre rule internals") {
  const auto& r = detail::gauss_legendre(15);
  REQUIRE(r.x.size() == 15);
  double wsum = 0.0;
  for (double w : r.w) wsum += w;
  CHECK(wsum == Approx(2.0).epsilon(1e-14));
  // integrates x^28 exactly (degree <= 2n-1)
  double p = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) p += r.w[i] * std::pow(r.x[i], 28);
  CHECK(p == Approx(2.0 / 29.0).epsilon(1e-12));
}

TEST_CASE("budget exhaustion raises a convergence error with partials") {
  quadrature_spec spec;
  spec.rel_tol = 1e-13;
  spec.max_evals = 2000;
  auto f = [](double u, double v) {
    const double q = std::hypot(u, v);
    return q > 350.0 ? 0.0 : std::log1p(-std::exp(-2.0 * q)) * std::cos(20.0 * u);
  };
  try {
    integrate2d(f, spec);
    FAIL("expected convergence_error");
  } catch (const convergence_error& e) {
    CHECK(e.evaluations() >= 2000);
    CHECK(std::isfinite(e.partial_value()));
    CHECK(e.error_estimate() > 0.0);
  }
}

TEST_CASE("spec validation") {
  quadrature_spec bad;
  bad.rel_tol = 0.0;
  CHECK_THROWS_AS(integrate2d([](double, double) { return 0.0; }, bad), std::invalid_argument);
  bad = {};
  bad.max_evals = 10;
  CHECK_THROWS_AS(integrate2d([](double, double) { return 0.0; }, bad), std::invalid_argument);
}
