#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "cvmw/errors.hpp"
#include "cvmw/gkp_approx.hpp"
#include "cvmw/lattice.hpp"

using namespace cvmw;

namespace {

constexpr double kPi = std::numbers::pi;

// <m|D(alpha)|n> from the associated Laguerre closed form.
Complex displacement_entry(int m, int n, Complex alpha) {
  const double a2 = std::norm(alpha);
  if (m >= n) {
    const double pref = std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0)) - 0.5 * a2);
    return pref * std::pow(alpha, m - n) * std::assoc_laguerre(n, m - n, a2);
  }
  const double pref = std::exp(0.5 * (std::lgamma(m + 1.0) - std::lgamma(n + 1.0)) - 0.5 * a2);
  return pref * std::pow(-std::conj(alpha), n - m) * std::assoc_laguerre(m, n - m, a2);
}

const ApproxCodespace& square_codespace() {
  static const ApproxCodespace cs = approx_gkp_codespace(catalog_lattice("square"), EnvelopeParams(0.3));
  return cs;
}

}  // namespace

TEST_SUITE("gkp_approx") {
  TEST_CASE("displacement entries match the Laguerre closed form") {
    const std::vector<double> xi{0.7, -0.4};
    const Complex alpha(xi[0] / std::sqrt(2.0), xi[1] / std::sqrt(2.0));
    const auto D = displacement_matrix(xi, 40);
    for (int m = 0; m < 30; ++m)
      for (int n = 0; n < 30; ++n) CHECK(std::abs(D(m, n) - displacement_entry(m, n, alpha)) < 1e-12);
    CHECK(D(0, 0).real() == doctest::Approx(std::exp(-(0.49 + 0.16) / 4.0)).epsilon(1e-14));
  }

  TEST_CASE("truncated displacement is unitary on its leading block") {
    for (double s : {0.3, 1.0, 2.0}) {
      for (int cutoff : {120, 250}) {
        const std::vector<double> xi{s * 0.6, s * 0.8};
        const auto D = displacement_matrix(xi, cutoff);
        const int b = unitary_block_size(xi, cutoff);
        REQUIRE(b > 0);
        const Eigen::MatrixXcd U = D.matrix().adjoint() * D.matrix();
        CHECK((U.topLeftCorner(b, b) - Eigen::MatrixXcd::Identity(b, b)).cwiseAbs().maxCoeff() < 1e-8);
      }
    }
  }

  TEST_CASE("displacement preconditions") {
    const std::vector<double> xi{3.0, 0.0};
    CHECK_THROWS_AS(displacement_matrix(xi, 36), TruncationError);
    const std::vector<double> huge{40.0, 30.0};
    CHECK_THROWS_AS(displacement_matrix(huge, 20000), ValidationError);
  }

  TEST_CASE("D(xi) D(-xi) is the identity and D(xi)^dagger = D(-xi)") {
    const std::vector<double> xi{0.5, 0.9}, mxi{-0.5, -0.9};
    const auto D = displacement_matrix(xi, 80);
    const auto Dm = displacement_matrix(mxi, 80);
    CHECK((D.adjoint().matrix() - Dm.matrix()).cwiseAbs().maxCoeff() < 1e-13);
    const int b = unitary_block_size(xi, 80);
    const Eigen::MatrixXcd P = (D * Dm).matrix();
    CHECK((P.topLeftCorner(b, b) - Eigen::MatrixXcd::Identity(b, b)).cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("enveloped characteristic function: Fock trace vs closed form") {
    const EnvelopeParams P(0.5);
    const std::vector<double> sigma{0.0, 0.6}, xi{0.7, 0.0};
    const Complex fock = enveloped_char(sigma, P, xi, 200);
    const Complex closed = enveloped_char_analytic(sigma, P, xi);
    CHECK(std::abs(fock - closed) < 1e-9 * std::abs(closed));
    CHECK(closed.real() == doctest::Approx(1.0672840435).epsilon(1e-9));
    const std::vector<double> zero{0.0, 0.0};
    CHECK(enveloped_char_analytic(zero, P, zero).real() == doctest::Approx(1.0 / (1.0 - std::exp(-0.5))));
    CHECK(P.T() == doctest::Approx(std::tanh(0.125)));
    CHECK_THROWS_AS(EnvelopeParams(0.0), ValidationError);
  }

  TEST_CASE("approximate codespace is orthonormal and converged") {
    const auto& cs = square_codespace();
    REQUIRE(cs.states.size() == 2);
    CHECK(cs.cutoff == static_cast<int>(std::ceil(12.0 / 0.09)));
    CHECK(std::abs(cs.states[0].norm() - 1.0) < 1e-12);
    CHECK(std::abs(cs.states[1].norm() - 1.0) < 1e-12);
    CHECK(std::abs(cs.states[0].dot(cs.states[1])) < 1e-12);
    CHECK(cs.norm_drift < 1e-6);
    CHECK(cs.lambda1_dual == doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
    // sigma1^T Omega sigma2 = pi for a qubit code.
    CHECK(cs.sigma1(0) * cs.sigma2(1) - cs.sigma1(1) * cs.sigma2(0) == doctest::Approx(kPi).epsilon(1e-12));
    const auto rho = maximally_mixed_state(cs);
    CHECK(rho.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rho.is_hermitian());
  }

  TEST_CASE("codespace preconditions") {
    CHECK_THROWS_AS(approx_gkp_codespace(catalog_lattice("square"), EnvelopeParams(0.05)), ValidationError);
    CHECK_THROWS_AS(approx_gkp_codespace(catalog_lattice("selfdual:1"), EnvelopeParams(0.3)), ValidationError);
    CHECK_THROWS_AS(approx_gkp_codespace(catalog_lattice("e8-unit"), EnvelopeParams(0.3)), ValidationError);
  }

  TEST_CASE("trapezoid and Fourier angular integration agree") {
    const auto& cs = square_codespace();
    std::vector<double> g;
    for (int i = 0; i <= 12; ++i) g.push_back(0.1 * i);
    const auto W1 = approx_weights(cs, g, {AngularQuadrature::Method::trapezoid, 64});
    const auto W2 = approx_weights(cs, g, {AngularQuadrature::Method::fourier, 0});
    for (double r : g) {
      CHECK(W1.A.density(r) == doctest::Approx(W2.A.density(r)).epsilon(1e-8).scale(1e-8));
      CHECK(W1.B.density(r) == doctest::Approx(W2.B.density(r)).epsilon(1e-8).scale(1e-8));
      CHECK(W2.A.density(r) >= 0.0);
      CHECK(W2.A.density(r) <= 2.0 * W2.B.density(r) * (1.0 + 1e-9) + 1e-300);
    }
  }

  // A phase rotation exp(-i theta n) maps D(xi) to D(R xi), so the circle
  // averages defining A and B cannot change.
  TEST_CASE("weights are invariant under a phase-space rotation") {
    const auto& cs = square_codespace();
    ApproxCodespace rotated = cs;
    const double theta = 0.7;
    for (auto& v : rotated.states)
      for (Eigen::Index n = 0; n < v.size(); ++n) v(n) *= std::polar(1.0, -theta * static_cast<double>(n));
    const std::vector<double> g{0.0, 0.4, 0.9, 1.3, 2.0};
    const auto W0 = approx_weights(cs, g, {AngularQuadrature::Method::fourier, 0});
    const auto W1 = approx_weights(rotated, g, {AngularQuadrature::Method::fourier, 0});
    for (double r : g) {
      CHECK(W1.A.density(r) == doctest::Approx(W0.A.density(r)).epsilon(1e-9).scale(1e-9));
      CHECK(W1.B.density(r) == doctest::Approx(W0.B.density(r)).epsilon(1e-9).scale(1e-9));
    }
  }

  TEST_CASE("an under-resolved trapezoid rule is reported") {
    const auto& cs = square_codespace();
    const std::vector<double> g{0.0, 1.0, 2.0, 4.0};
    CHECK_THROWS_AS(approx_weights(cs, g, {AngularQuadrature::Method::trapezoid, 4}), AccuracyError);
  }

  TEST_CASE("epsilon is small and positive below the halved distance") {
    const auto& cs = square_codespace();
    const auto e = approx_qedc_epsilon(cs, 0.2 * std::sqrt(kPi));
    CHECK(e.eps > 0.0);
    CHECK(e.eps < 1e-2);
    CHECK(e.d == doctest::Approx(0.5 * std::sqrt(kPi) - 0.2 * std::sqrt(kPi)));
    CHECK(e.argmax <= e.d + 1e-12);
    const auto single = approx_epsilon_at(cs, e.argmax, {AngularQuadrature::Method::fourier, 0});
    CHECK(single.eps == doctest::Approx(e.eps).epsilon(1e-6));
  }

  TEST_CASE("fidelity identities at a single radius") {
    const auto cs = approx_gkp_codespace(catalog_lattice("square"), EnvelopeParams(0.3));
    const auto rho = maximally_mixed_state(cs);
    const double r = 0.8;
    const auto f = fidelity_identities(rho, r, 64);
    const std::vector<double> g{0.0, 0.4, r, 1.6};
    const auto W = approx_weights(cs, g, {AngularQuadrature::Method::fourier, 0});
    const double S = 2.0 * kPi * r;
    CHECK(f.entanglement_fidelity == doctest::Approx(W.A.density(r) / (4.0 * S)).epsilon(1e-6));
    CHECK(f.stay_probability == doctest::Approx(W.B.density(r) / (4.0 * S)).epsilon(1e-6));
    CHECK(f.entanglement_fidelity <= f.stay_probability * 2.0 + 1e-12);
  }

  TEST_CASE("occupation chain") {
    const auto& cs = square_codespace();
    const auto c = second_moment_chain(catalog_lattice("square"), cs);
    CHECK(c.min_occupation_exact <= c.min_occupation_scan + 1e-9);
    CHECK(c.min_occupation_scan <= c.b_moment);
    CHECK(c.b_moment <= c.upper);
    CHECK(c.upper == doctest::Approx(4.0 * c.nbar + 3.0));
  }
}
