#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "cvmw/errors.hpp"
#include "cvmw/hankel.hpp"
#include "cvmw/weights.hpp"

using namespace cvmw;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> grid(double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = hi * i / (n - 1);
  return g;
}

double max_abs_diff(const WeightDistribution& B, const std::function<double(double)>& ref, std::span<const double> g) {
  double worst = 0.0;
  for (double r : g) worst = std::max(worst, std::abs(B.density(r) - ref(r)));
  return worst;
}

}  // namespace

TEST_SUITE("hankel") {
  TEST_CASE("the Gaussian is a fixed point of the radial Fourier transform in every dimension") {
    const auto gauss = RadialFunction::closed_form(
        "gauss", {}, [](double r) { return std::exp(-0.5 * r * r); }, DecayHint::gaussian(1.0));
    for (double N : {0.5, 1.0, 1.5, 2.0, 4.0}) {
      for (double y : {0.0, 0.3, 1.0, 2.5, 5.0}) {
        CHECK(std::abs(radial_fourier(gauss, N, y) - std::exp(-0.5 * y * y)) < 1e-9);
      }
    }
  }

  TEST_CASE("polynomial decay: (1 + r^2)^{-5/2} transforms to (1 + y) exp(-y) / 3 in two dimensions") {
    const auto f = RadialFunction::closed_form(
        "poisson", {}, [](double r) { return std::pow(1.0 + r * r, -2.5); }, DecayHint::polynomial(5.0));
    for (double y : {0.0, 0.5, 1.0, 2.0, 4.0}) {
      const auto res = radial_fourier_detailed(f, 1.0, y);
      CHECK(std::abs(res.value - (1.0 + y) * std::exp(-y) / 3.0) < 1e-8);
    }
  }

  TEST_CASE("compact support: the disc indicator transforms to J1(y) / y") {
    const auto disc = RadialFunction::closed_form(
        "disc", {}, [](double r) { return r <= 1.0 ? 1.0 : 0.0; }, DecayHint::compact(1.0));
    for (double y : {0.0, 0.7, 3.0, 10.0}) {
      const double ref = y == 0.0 ? 0.5 : std::cyl_bessel_j(1.0, y) / y;
      CHECK(std::abs(radial_fourier(disc, 1.0, y) - ref) < 1e-9);
    }
  }

  TEST_CASE("integrability preconditions") {
    const auto slow = RadialFunction::closed_form(
        "slow", {}, [](double r) { return 1.0 / (1.0 + r * r); }, DecayHint::polynomial(2.0));
    CHECK_THROWS_AS(radial_fourier(slow, 1.0, 1.0), ValidationError);
    QuadratureConfig bad;
    bad.nodes_per_panel = 2;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = {};
    bad.tail_tolerance = 0.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
  }

  TEST_CASE("coherent weight distribution is an eigenfunction") {
    const auto W = analytic_weights(ModelSpec::parse("coherent"));
    const auto g = grid(6.0, 121);
    const auto B = macwilliams_transform(W.A, g);
    CHECK(max_abs_diff(B, [](double r) { return 2.0 * kPi * r * std::exp(-0.5 * r * r); }, g) < 1e-6);
  }

  TEST_CASE("transform is linear") {
    const auto W = analytic_weights(ModelSpec::parse("fock:2"));
    const auto g = grid(5.0, 26);
    const auto B1 = macwilliams_transform(W.A, g);
    const auto B3 = macwilliams_transform(W.A.scaled(3.0), g);
    // Equal up to the absolute tail tolerance, which picks the truncation radius.
    for (double r : g) CHECK(std::abs(B3.density(r) - 3.0 * B1.density(r)) < 1e-8);
  }

  TEST_CASE("point masses transform exactly") {
    // A single mass m at x = l gives B(r) = m r J0(r l) for one mode.
    const WeightDistribution A(1.0, std::nullopt, {{0.0, 1.0}, {1.5, 2.0}});
    const auto g = grid(4.0, 41);
    const auto B = macwilliams_transform(A, g);
    for (double r : g) {
      CHECK(B.density(r) == doctest::Approx(r * (1.0 + 2.0 * std::cyl_bessel_j(0.0, 1.5 * r))).epsilon(1e-10).scale(1e-10));
    }
  }

  TEST_CASE("double transform returns the input") {
    for (const char* model : {"coherent", "fock:1", "fock:3"}) {
      const auto W = analytic_weights(ModelSpec::parse(model));
      CHECK(involution_residual(W.A, grid(8.0, 81)) < 1e-5);
    }
    const WeightDistribution comb(1.0, std::nullopt, {{1.0, 1.0}});
    CHECK_THROWS_AS(involution_residual(comb, grid(1.0, 3)), ValidationError);
  }

  TEST_CASE("lazy transform agrees with the sampled one") {
    const auto W = analytic_weights(ModelSpec::parse("fock:1"));
    const auto f = macwilliams_function(W.A);
    const auto g = grid(4.0, 9);
    const auto B = macwilliams_transform(W.A, g);
    for (double r : g) CHECK(f(r) == doctest::Approx(B.density(r)).epsilon(1e-12).scale(1e-12));
  }

  TEST_CASE("sphere averages of plane waves reduce to Bessel functions") {
    // One mode: J0(r |eta|).  Two modes: J1(r |eta|).
    const std::vector<double> eta1{0.8, -0.5};
    const double n1 = std::hypot(0.8, 0.5);
    for (double r : {0.5, 1.0, 3.0}) {
      const auto v = zonal_surface_integral(1, r, eta1);
      CHECK(v.real() == doctest::Approx(std::cyl_bessel_j(0.0, r * n1)).epsilon(1e-12).scale(1e-12));
      CHECK(std::abs(v.imag()) < 1e-12);
    }
    const std::vector<double> eta2{0.3, -0.4, 0.5, 0.1};
    const double n2 = std::sqrt(0.09 + 0.16 + 0.25 + 0.01);
    for (double r : {0.5, 2.0}) {
      const auto v = zonal_surface_integral(2, r, eta2);
      CHECK(v.real() == doctest::Approx(std::cyl_bessel_j(1.0, r * n2)).epsilon(1e-10).scale(1e-10));
      CHECK(std::abs(v.imag()) < 1e-10);
    }
    // The |eta|^{N-1} prefactor makes the two-mode value vanish at eta = 0.
    const std::vector<double> zero4{0.0, 0.0, 0.0, 0.0};
    CHECK(std::abs(zonal_surface_integral(2, 1.0, zero4)) == doctest::Approx(0.0));
    CHECK_THROWS_AS(zonal_surface_integral(3, 1.0, eta2), ValidationError);
    CHECK_THROWS_AS(zonal_surface_integral(1, 1.0, eta2), ValidationError);
  }
}
