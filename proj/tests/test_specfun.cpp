// Special functions checked against libstdc++'s C++17 special math functions,
// which are an implementation independent of the one under test.
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cvmw/errors.hpp"
#include "cvmw/quadrature.hpp"
#include "cvmw/specfun.hpp"

using namespace cvmw;

TEST_SUITE("specfun") {
  TEST_CASE("integer and half-integer Bessel J match the standard library") {
    for (int twice = -1; twice <= 16; ++twice) {
      const double nu = 0.5 * twice;
      for (double x = 0.0; x <= 60.0; x += 0.37) {
        if (nu < 0.0 && x == 0.0) continue;
        const double ref = nu < 0.0 ? std::sqrt(2.0 / (std::numbers::pi * x)) * std::cos(x) : std::cyl_bessel_j(nu, x);
        const double got = bessel_j(nu, x);
        CHECK(got == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
      }
    }
  }

  TEST_CASE("large arguments stay accurate") {
    for (double x : {150.0, 400.0, 1000.0}) {
      for (double nu : {0.0, 1.0, 3.5, 7.0}) CHECK(std::abs(bessel_j(nu, x) - std::cyl_bessel_j(nu, x)) < 1e-11);
    }
  }

  TEST_CASE("J_{1/2} has the elementary closed form") {
    for (double x = 0.1; x < 20.0; x += 0.9) {
      CHECK(bessel_j(0.5, x) == doctest::Approx(std::sqrt(2.0 / (std::numbers::pi * x)) * std::sin(x)).epsilon(1e-12));
    }
  }

  TEST_CASE("non half-integer orders are rejected") {
    CHECK_THROWS_AS(BesselOrder(0.3), OrderDomainError);
    CHECK_THROWS_AS(bessel_j(0.25, 1.0), OrderDomainError);
    CHECK_THROWS_AS(BesselOrder(-1.0), OrderDomainError);
    CHECK_THROWS_AS(bessel_j(1.0, -0.5), ValidationError);
    CHECK(BesselOrder(2.5) == BesselOrder::from_twice(5));
    CHECK(BesselOrder(2.5).is_half_integer());
  }

  TEST_CASE("Bessel zeros") {
    CHECK(bessel_zero(0.0, 1) == doctest::Approx(2.404825557695773).epsilon(1e-14));
    CHECK(bessel_zero(1.0, 1) == doctest::Approx(3.831705970207512).epsilon(1e-14));
    CHECK(bessel_zero(2.0, 1) == doctest::Approx(5.135622301840683).epsilon(1e-14));
    CHECK(bessel_zero(4.0, 1) == doctest::Approx(7.588342434503805).epsilon(1e-14));
    CHECK(bessel_zero(0.5, 3) == doctest::Approx(3.0 * std::numbers::pi).epsilon(1e-14));
    for (double nu : {0.0, 1.0, 1.5, 2.0, 4.0, 9.0}) {
      double prev = 0.0;
      for (int k = 1; k <= 30; ++k) {
        const double z = bessel_zero(nu, k);
        CHECK(z > prev);
        CHECK(std::abs(std::cyl_bessel_j(nu, z)) < 1e-12);
        prev = z;
      }
    }
    CHECK_THROWS_AS(bessel_zero(1.0, 0), ValidationError);
  }

  TEST_CASE("I0 and its scaled form") {
    for (double x = 0.0; x <= 600.0; x += 7.3) {
      CHECK(bessel_i0(x) == doctest::Approx(std::cyl_bessel_i(0.0, x)).epsilon(1e-12));
      CHECK(bessel_i0_scaled(x) == doctest::Approx(std::exp(-x) * std::cyl_bessel_i(0.0, x)).epsilon(1e-12));
    }
    CHECK(std::isfinite(bessel_i0_scaled(5000.0)));
    CHECK(bessel_i0_scaled(5000.0) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi * 5000.0)).epsilon(1e-4));
    CHECK_THROWS_AS(bessel_i0(701.0), ValidationError);
  }

  TEST_CASE("Laguerre polynomials") {
    for (int n : {0, 1, 2, 3, 7, 20, 60}) {
      for (double x = 0.0; x < 40.0; x += 1.3) {
        const double ref = std::laguerre(n, x);
        CHECK(laguerre(n, x) == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
      }
    }
    CHECK_THROWS_AS(laguerre(-1, 1.0), ValidationError);
  }

  TEST_CASE("gamma, beta, factorial and sphere areas") {
    CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)));
    CHECK(factorial(4.0) == doctest::Approx(24.0));
    CHECK(factorial(0.5) == doctest::Approx(std::sqrt(std::numbers::pi) / 2.0));
    CHECK(beta_fn(2.0, 3.0) == doctest::Approx(1.0 / 12.0));
    CHECK(sphere_area(1, 2.0) == doctest::Approx(4.0 * std::numbers::pi));
    CHECK(sphere_area(2, 1.0) == doctest::Approx(4.0 * std::numbers::pi));
    CHECK(sphere_area(3, 1.0) == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi));
    CHECK_THROWS_AS(gamma_fn(-1.0), ValidationError);
  }

  TEST_CASE("zonal function and its value at the origin") {
    for (double N : {0.5, 1.0, 1.5, 2.0, 4.0}) {
      CHECK(zonal(N, 0.0) == doctest::Approx(zonal_at_origin(N)).epsilon(1e-14));
      CHECK(zonal(N, 1e-6) == doctest::Approx(zonal_at_origin(N)).epsilon(1e-9));
      for (double x = 0.2; x < 30.0; x += 0.7) {
        // libstdc++ rejects negative orders, so J_{-1/2} uses its closed form.
        const double j = N == 0.5 ? std::sqrt(2.0 / (std::numbers::pi * x)) * std::cos(x) : std::cyl_bessel_j(N - 1.0, x);
        CHECK(zonal(N, x) == doctest::Approx(j / std::pow(x, N - 1.0)).epsilon(1e-10).scale(1e-3));
      }
    }
    CHECK(zonal_at_origin(1.0) == doctest::Approx(1.0));
    CHECK(zonal_at_origin(2.0) == doctest::Approx(0.5));
    CHECK_THROWS_AS(zonal(0.25, 1.0), OrderDomainError);
  }

  TEST_CASE("Gauss-Legendre quadrature") {
    CHECK(integrate_gl([](double x) { return std::pow(x, 9); }, 0.0, 2.0, 5) == doctest::Approx(102.4).epsilon(1e-13));
    CHECK(integrate_composite([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, 8) ==
          doctest::Approx(2.0).epsilon(1e-14));
    const auto& rule = gauss_legendre(16);
    double s = 0.0;
    for (double w : rule.weights) s += w;
    CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(gauss_legendre(0), ValidationError);
    const auto m = golden_section_max([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0);
    CHECK(m.x == doctest::Approx(0.3).epsilon(1e-6));
  }
}
