// Acceptance gate: one PASS/FAIL line per criterion at the stated tolerances.
// Exit status is non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "cvmw/bounds.hpp"
#include "cvmw/errors.hpp"
#include "cvmw/gkp_approx.hpp"
#include "cvmw/hankel.hpp"
#include "cvmw/lattice.hpp"
#include "cvmw/weights.hpp"

using namespace cvmw;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(const char* id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %s %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Independent evaluation with the standard library's Bessel functions.
double std_first_zero(double nu) {
  double a = nu + 0.5, b = a;
  const double sa = std::cyl_bessel_j(nu, a);
  while (std::cyl_bessel_j(nu, b) * sa > 0.0) b += 0.05;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    (std::cyl_bessel_j(nu, m) * sa > 0.0 ? a : b) = m;
  }
  return 0.5 * (a + b);
}

double max_error(const WeightDistribution& B, const std::function<double(double)>& ref, std::span<const double> g) {
  double worst = 0.0;
  for (double r : g) worst = std::max(worst, std::abs(B.density(r) - ref(r)));
  return worst;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto W = analytic_weights(ModelSpec::parse("coherent"));
  const auto g = grid(0.0, 6.0, 601);
  const auto B = macwilliams_transform(W.A, g);
  const double err = max_error(B, [](double r) { return 2.0 * kPi * r * std::exp(-0.5 * r * r); }, g);
  const double t = elapsed_since(t0);
  return {err <= 1e-6 && t < 5.0, fmt("max error %.3g (tol 1e-6), runtime %.2f s (limit 5 s)", err, t)};
}

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto g = grid(0.0, 8.0, 801);
  double worst = 0.0;
  for (int n : {1, 3}) {
    const auto W = analytic_weights(ModelSpec::parse("fock:" + std::to_string(n)));
    const auto B = macwilliams_transform(W.A, g);
    worst = std::max(worst, max_error(B, [&](double r) { return W.A.density(r); }, g));
  }
  const double t = elapsed_since(t0);
  return {worst <= 1e-5 && t < 10.0, fmt("max error %.3g over n = 1, 3 (tol 1e-5), runtime %.2f s (limit 10 s)", worst, t)};
}

Outcome criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto W = analytic_weights(ModelSpec::parse("cat:4"));
  const auto g = grid(0.0, 10.0, 1001);
  const auto B = macwilliams_transform(W.A, g);
  const double err = max_error(B, [&](double r) { return W.B.density(r); }, g);
  const double t = elapsed_since(t0);
  return {err <= 1e-6 && t < 10.0, fmt("max error %.3g (tol 1e-6), runtime %.2f s (limit 10 s)", err, t)};
}

Outcome criterion4() {
  const auto n = normalization_integrals(analytic_weights(ModelSpec::parse("cat:4")));
  const double ea = std::abs(n.intA / (4.0 * kPi * (1.0 + std::exp(-32.0))) - 1.0);
  const double eb = std::abs(n.intB / (8.0 * kPi) - 1.0);
  return {ea <= 1e-8 && eb <= 1e-8, fmt("int A rel error %.3g, int B rel error %.3g (tol 1e-8)", ea, eb)};
}

Outcome criterion5() {
  double worst = 0.0;
  for (const char* m : {"coherent", "fock:1", "fock:3", "cat:4"}) {
    const auto W = analytic_weights(ModelSpec::parse(m));
    worst = std::max(worst, involution_residual(W.A, grid(0.0, 8.0, 161)));
  }
  return {worst <= 1e-5, fmt("worst relative residual %.3g over coherent, fock:1, fock:3, cat:4 (tol 1e-5)", worst)};
}

Outcome criterion6() {
  const auto L = catalog_lattice("square");
  const auto s = length_spectrum(L, 6.0);
  const double rp = std::sqrt(kPi);
  bool spec_ok = s.entries.size() >= 3 && s.entries[0].length == 0.0 && s.entries[0].multiplicity == 1 &&
                 std::abs(s.entries[1].length - 2.0 * rp) < 1e-10 && s.entries[1].multiplicity == 4 &&
                 std::abs(s.entries[2].length - std::sqrt(8.0 * kPi)) < 1e-10 && s.entries[2].multiplicity == 4;
  const double K = code_size(L);
  const double dist_err = std::abs(gkp_distance(L) - rp);
  const double res = poisson_macwilliams_residual(L, 1.0, 12.0);
  const bool ok = spec_ok && std::abs(K - 2.0) < 1e-12 && dist_err <= 1e-10 && res <= 1e-8;
  return {ok, std::string(spec_ok ? "spectrum ok" : "spectrum MISMATCH") +
                  fmt(", K = %.12g, |d - sqrt(pi)| = %.3g (tol 1e-10), Poisson residual %.3g (tol 1e-8)", K, dist_err, res)};
}

Outcome criterion7() {
  double worst = 0.0;
  for (double N : {1.0, 2.0, 4.0}) {
    const double j = std_first_zero(N);
    const double expected = std::pow(j, 2.0 * N) / (std::tgamma(N + 1.0) * std::pow(2.0, N));
    worst = std::max(worst, std::abs(lev_f(N, 0.0) / lev_fhat(N, 0.0) / expected - 1.0));
  }
  const double n1 = lev_f(1.0, 0.0) / lev_fhat(1.0, 0.0);
  const LevenshteinFunction half(0.5);
  double half_err = 0.0;
  for (double y : grid(0.0, 2.0 * kPi, 629)) {
    const double ref = (4.0 * kPi + 2.0 * std::sin(y) - 2.0 * y) / (4.0 * std::sqrt(2.0 * kPi * kPi * kPi));
    half_err = std::max(half_err, std::abs(half.fhat(y) - ref));
  }
  return {worst <= 1e-8 && half_err <= 1e-6,
          fmt("endpoint ratio rel error %.3g over N = 1, 2, 4 (tol 1e-8), N = 1 ratio %.10f, N = 1/2 max error %.3g (tol 1e-6)",
              worst, n1, half_err)};
}

Outcome criterion8() {
  const double j = std_first_zero(1.0);
  const double num = 16.0 * 1.0 * std::abs(std::cyl_bessel_j(0.0, j));
  const double den = 3.0 * std::sqrt(kPi) * std::tgamma(0.5) * std::pow(j, -1.0);
  const double indep = std::pow(num / den, 1.0 / 6.0);
  const double e1 = std::abs(d_plus(1.0) - indep);
  bool lemma = true;
  for (double N : {1.0, 2.0})
    for (double s : {0.5, 1.0}) lemma = lemma && lemma2_supremum_check(N, s * d_plus(N)).at_origin;
  const double half = d_plus(0.5);
  const double e3 = std::abs(half - std::pow(12.0 * kPi, 1.0 / 6.0));
  return {e1 <= 1e-10 && lemma && e3 <= 1e-12,
          fmt("d_plus(1) = %.10f, |diff| %.3g (tol 1e-10); ", d_plus(1.0), e1) +
              (lemma ? "supremum at origin for N = 1, 2 at 0.5 and 1.0 d_plus" : "supremum NOT at origin") +
              fmt("; d_plus(1/2) = %.6f", half)};
}

Outcome criterion9() {
  const auto L = catalog_lattice("e8");
  const double d = gkp_distance(L);
  const double target = std::pow(2.0, 0.875) * std::sqrt(kPi);
  const double K = code_size(L);
  const double sat = std::abs(K * std::pow(d, 8) / std::pow(4.0 * kPi, 4) - 1.0);
  return {std::abs(d - target) <= 1e-9 && sat <= 1e-6,
          fmt("d = %.12f (|diff| %.3g, tol 1e-9), K = %.12g, K d^8 / (4 pi)^4 - 1 = %.3g (tol 1e-6)", d,
              std::abs(d - target), K, sat)};
}

Outcome criterion10() {
  std::size_t violations = 0;
  double tightest_g = 0.0, tightest_phi = 0.0;
  for (double N : {1.0, 2.0, 4.0}) {
    const LevenshteinFunction lev(N);
    const double j = lev.jN();
    const double C = quad_bound_constant(N);
    const double k = 9.0 / (std::pow(2.0, N + 2.0) * std::tgamma(N + 1.0));
    const double phij = std::cyl_bessel_j(N - 1.0, j) / std::pow(j, N - 1.0);
    for (int i = 0; i < 10000; ++i) {
      const double x = j * i / 9999.0;
      const double q = (x - j) * (x - j);
      const double phi = x == 0.0 ? 1.0 / (std::pow(2.0, N - 1.0) * std::tgamma(N))
                                  : std::cyl_bessel_j(N - 1.0, x) / std::pow(x, N - 1.0);
      // Absolute slack at the rounding level of each side: at x = j both
      // sides vanish and g is only known to about 1e-16 c.
      if (q > 1e-8) {
        tightest_g = std::max(tightest_g, lev.g(x) / (0.5 * C * q));
        tightest_phi = std::max(tightest_phi, (phi - phij) / (k * q));
      }
      if (lev.g(x) > 0.5 * C * q * (1.0 + 1e-12) + 1e-14 * lev.cN()) ++violations;
      if (phi - phij > k * q * (1.0 + 1e-12) + 1e-14) ++violations;
    }
  }
  return {violations == 0, fmt("%.0f violations on 10^4-point grids for N = 1, 2, 4; max ratios g: %.4f, phi: %.4f",
                               static_cast<double>(violations), tightest_g, tightest_phi)};
}

Outcome criterion11() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> deltas{0.22, 0.18, 0.15, 0.13};
  const auto fit = fit_epsilon_slope(catalog_lattice("square"), 0.2 * std::sqrt(kPi), deltas);
  const double t = elapsed_since(t0);
  const bool ok = fit.slope < 0.0 && fit.relative_deviation <= 0.35 && t < 600.0;
  return {ok, fmt("slope %.5f vs reference %.5f, relative deviation %.3f (tol 0.35), runtime %.1f s", fit.slope,
                  fit.reference, fit.relative_deviation, t)};
}

Outcome criterion12() {
  const auto cs = approx_gkp_codespace(catalog_lattice("square"), EnvelopeParams(0.2));
  const auto rho = maximally_mixed_state(cs);
  const std::vector<double> radii{0.5, 1.0, 1.5};
  std::vector<double> g{0.0, 0.5, 1.0, 1.5, 2.0};
  const auto W = approx_weights(cs, g, {AngularQuadrature::Method::fourier, 0});
  double worst = 0.0;
  for (double r : radii) {
    const auto f = fidelity_identities(rho, r, 128);
    const double S = 2.0 * kPi * r;  // surface of the circle of radius r
    worst = std::max(worst, std::abs(W.A.density(r) / (4.0 * S) - f.entanglement_fidelity));
    worst = std::max(worst, std::abs(W.B.density(r) / (4.0 * S) - f.stay_probability));
  }
  return {worst <= 1e-4, fmt("max abs difference %.3g at r = 0.5, 1, 1.5 (tol 1e-4)", worst)};
}

Outcome criterion13() {
  std::string detail;
  bool ok = true;
  const auto g = grid(0.0, 12.0, 2401);
  for (const char* m : {"coherent", "fock:1", "fock:3", "cat:4"}) {
    const auto spec = ModelSpec::parse(m);
    const auto W = analytic_weights(spec);
    bool signs = true;
    for (double r : g) signs = signs && W.A.density(r) >= 0.0 && W.B.density(r) >= 0.0;
    const bool order = ordering_check(W.A, W.B, spec.code_dimension(), g);
    ok = ok && signs && order;
    if (!signs || !order) detail += std::string(m) + " violates; ";
  }
  std::size_t comb_points = 0;
  for (const char* name : {"square", "hexagonal"}) {
    const auto L = catalog_lattice(name);
    const auto [A, B] = gkp_weights(L, 10.0);
    const double K = code_size(L);
    bool signs = true;
    for (const auto& m : A.discrete()) signs = signs && m.mass >= 0.0;
    for (const auto& m : B.discrete()) signs = signs && m.mass >= 0.0;
    const bool order = ordering_check(A, B, K, {});
    // Below the distance the only common support point is the origin.
    const double d = gkp_distance(L);
    bool equality = true;
    for (const auto& m : B.discrete()) {
      if (m.location >= d) break;
      ++comb_points;
      double a = 0.0;
      for (const auto& x : A.discrete())
        if (std::abs(x.location - m.location) < 1e-9) a = x.mass;
      equality = equality && std::abs(a - K * m.mass) <= 1e-12 * a;
    }
    ok = ok && signs && order && equality;
    if (!(signs && order && equality)) detail += std::string(name) + " comb violates; ";
  }
  const auto cs = approx_gkp_codespace(catalog_lattice("square"), EnvelopeParams(0.2));
  const auto ga = grid(0.0, 4.0, 81);
  const auto W = approx_weights(cs, ga, {AngularQuadrature::Method::fourier, 0});
  bool approx_ok = ordering_check(W.A, W.B, 2.0, ga);
  for (double r : ga) approx_ok = approx_ok && W.A.density(r) >= 0.0 && W.B.density(r) >= 0.0;
  ok = ok && approx_ok;
  if (!approx_ok) detail += "finite-energy GKP violates; ";
  if (detail.empty()) {
    detail = fmt("coherent, fock:1, fock:3, cat:4, finite-energy GKP (delta 0.2) and %.0f comb support points below the distance",
                 static_cast<double>(comb_points));
  }
  return {ok, detail};
}

// Requires a tabulated E8 auxiliary function (CSV x,f,fhat) in CVMW_F8_TABLE.
bool magic_criterion() {
  const char* path = std::getenv("CVMW_F8_TABLE");
  if (!path || !*path) {
    std::printf("[SKIP] magic quotient: set CVMW_F8_TABLE to a tabulated E8 auxiliary function (x,f,fhat)\n");
    return true;
  }
  bool result = true;
  run("M", "magic quotient (E8)", [&]() -> Outcome {
    std::ifstream in(path);
    if (!in) return {false, std::string("cannot open ") + path};
    const auto table = read_aux_table(in, path);
    const double ref = std::pow(2.0 * kPi, 4);
    bool ok = true;
    std::string detail;
    for (double d : {3.0, 3.4286}) {
      const auto q = magic_quotient_check(table, MagicFamily::e8, d);
      const double tol = std::max(1e-6, 10.0 * q.interpolation_error);
      const bool at_origin = q.attained_at == 0.0 && std::abs(q.sup / ref - 1.0) <= tol;
      ok = ok && at_origin;
      detail += fmt("d = %.4f: sup/ref - 1 = %.3g at x = %.4f; ", d, q.sup / ref - 1.0, q.attained_at);
    }
    const auto q = magic_quotient_check(table, MagicFamily::e8, 3.6);
    const double tol = std::max(1e-6, 10.0 * q.interpolation_error);
    ok = ok && q.relative_excess > tol;
    detail += fmt("d = 3.6: excess %.3g (needs > %.3g)", q.relative_excess, tol);
    result = ok;
    return {ok, detail};
  });
  return result;
}

}  // namespace

int main() {
  run("C1", "coherent eigenfunction", criterion1);
  run("C2", "Fock fixed points", criterion2);
  run("C3", "cat closed form", criterion3);
  run("C4", "cat normalization", criterion4);
  run("C5", "involution", criterion5);
  run("C6", "square GKP lattice", criterion6);
  run("C7", "Levenshtein endpoints", criterion7);
  run("C8", "thresholds", criterion8);
  run("C9", "E8 saturation", criterion9);
  run("C10", "quadratic bound constants", criterion10);
  run("C11", "finite-energy GKP slope", criterion11);
  run("C12", "fidelity identities", criterion12);
  run("C13", "ordering and sign", criterion13);
  magic_criterion();
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
