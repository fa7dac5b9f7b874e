#include "cvmw/hankel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "cvmw/errors.hpp"
#include "cvmw/parallel.hpp"
#include "cvmw/quadrature.hpp"
#include "cvmw/specfun.hpp"

namespace cvmw {

namespace {

constexpr double kPi = std::numbers::pi;

// Beyond this index the McMahon approximation is used for panel breakpoints.
constexpr int kExactZeroLimit = 400;

double kernel_zero(BesselOrder nu, int k) {
  if (k <= kExactZeroLimit) return bessel_zero(nu, k);
  const double mu = 4.0 * nu.value() * nu.value();
  const double beta = (k + 0.5 * nu.value() - 0.25) * kPi;
  return beta - (mu - 1.0) / (8.0 * beta);
}

// Gauss-Legendre panels over [a, b], split at zeros of J_{N-1}(y r).
double integrate_panels(const std::function<double(double)>& integrand, double a, double b, double N, double y,
                        const QuadratureConfig& cfg) {
  if (!(b > a)) return 0.0;
  std::vector<double> breaks{a};
  if (y > 0.0) {
    const BesselOrder nu(N - 1.0);
    int k = std::max(1, static_cast<int>(a * y / kPi) - 2);
    while (kernel_zero(nu, k) / y <= a) ++k;
    for (;; ++k) {
      const double z = kernel_zero(nu, k) / y;
      if (z >= b) break;
      breaks.push_back(z);
    }
  }
  breaks.push_back(b);

  const GaussRule& rule = gauss_legendre(cfg.nodes_per_panel);
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double lo = breaks[s], hi = breaks[s + 1];
    const double width = hi - lo;
    // A partial half-period at either end still gets the full panel count.
    int panels = y > 0.0 ? cfg.panels_per_half_period : 1;
    panels = std::max(panels, static_cast<int>(std::ceil(width / cfg.max_panel_width)));
    const double h = width / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = lo + (p + 0.5) * h, half = 0.5 * h;
      double sum = 0.0;
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * integrand(mid + half * rule.nodes[i]);
      total += sum * half;
    }
  }
  return total;
}

// Radius beyond which a gaussian-decaying w stays below tol / 10.
double gaussian_truncation(const std::function<double(double)>& w, double scale, const QuadratureConfig& cfg) {
  const double threshold = 0.1 * cfg.tail_tolerance;
  const double h = std::min(cfg.max_panel_width, 0.25 * scale);
  const double lookahead = 6.0 * scale;
  double last_big = 0.0;
  for (double r = 0.0; r <= last_big + lookahead; r += h) {
    if (r > cfg.max_truncation) {
      throw AccuracyError("gaussian decay hint: function does not fall below tolerance before max_truncation", 0.0,
                          std::abs(w(r)));
    }
    if (std::abs(w(r)) > threshold) last_big = r;
  }
  return std::max(last_big + h, h);
}

// Upper bound on int_R^inf |phi_N(y r)| C r^{-q} dr.
double polynomial_tail_bound(double C, double q, double R, double N, double y) {
  double best = std::numeric_limits<double>::infinity();
  if (q > 1.0) best = zonal_at_origin(N) * C * std::pow(R, 1.0 - q) / (q - 1.0);
  const double osc_exp = q + N - 1.5;
  if (y > 0.0 && osc_exp > 0.0 && y * R > 2.0 * (N + 1.0)) {
    // |J_nu(z)| <= sqrt(2 / (pi z)) asymptotically; 1.0 leaves a margin.
    const double osc = C * std::pow(y, 0.5 - N) * std::pow(R, -osc_exp) / osc_exp;
    best = std::min(best, osc);
  }
  return best;
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(truncation >= 0.0)) throw ValidationError("truncation radius must be >= 0 (0 selects it from the decay hint)");
  if (panels_per_half_period < 4) throw ValidationError("panels per half-period must be >= 4");
  if (nodes_per_panel < 8) throw ValidationError("nodes per panel must be >= 8");
  if (!(tail_tolerance > 0.0) || !(tail_tolerance < 1.0)) throw ValidationError("tail tolerance must lie in (0, 1)");
  if (!(max_panel_width > 0.0)) throw ValidationError("max panel width must be positive");
  if (!(max_truncation > 0.0)) throw ValidationError("max truncation must be positive");
}

IntegralResult zonal_integral(const std::function<double(double)>& w, double N, double y, const DecayHint& hint,
                              const QuadratureConfig& cfg) {
  cfg.validate();
  checked_modes(N);
  if (!(y >= 0.0) || !std::isfinite(y)) throw ValidationError("transform argument must be finite and >= 0");
  auto integrand = [&](double r) { return zonal(N, y * r) * w(r); };

  switch (hint.kind) {
    case DecayHint::Kind::compact: {
      const double R = cfg.truncation > 0.0 ? std::min(cfg.truncation, hint.param) : hint.param;
      return {integrate_panels(integrand, 0.0, R, N, y, cfg), 0.0, R};
    }
    case DecayHint::Kind::gaussian: {
      const double R = cfg.truncation > 0.0 ? cfg.truncation : gaussian_truncation(w, hint.param, cfg);
      return {integrate_panels(integrand, 0.0, R, N, y, cfg), 0.1 * cfg.tail_tolerance, R};
    }
    case DecayHint::Kind::polynomial: {
      const double q = hint.param;
      double R = cfg.truncation > 0.0 ? cfg.truncation : 64.0;
      double value = integrate_panels(integrand, 0.0, R, N, y, cfg);
      for (;;) {
        double C = 0.0;
        constexpr int kSamples = 257;
        for (int i = 0; i < kSamples; ++i) {
          const double r = 0.5 * R * (1.0 + static_cast<double>(i) / (kSamples - 1));
          C = std::max(C, std::abs(w(r)) * std::pow(r, q));
        }
        const double tail = polynomial_tail_bound(1.5 * C, q, R, N, y);
        if (tail <= cfg.tail_tolerance) return {value, tail, R};
        if (2.0 * R > cfg.max_truncation) {
          throw AccuracyError("polynomial tail did not converge within max_truncation", value, tail);
        }
        value += integrate_panels(integrand, R, 2.0 * R, N, y, cfg);
        R *= 2.0;
      }
    }
  }
  throw ValidationError("unknown decay hint");
}

IntegralResult radial_fourier_detailed(const RadialFunction& f, double N, double y, const QuadratureConfig& cfg) {
  checked_modes(N);
  DecayHint hint = f.decay();
  if (hint.kind == DecayHint::Kind::polynomial) {
    const double p = hint.param;
    if (!(p > N + 1.0)) {
      throw ValidationError("integrability: polynomial decay power " + std::to_string(p) + " must exceed N + 1");
    }
    if (y == 0.0 && !(p > 2.0 * N)) {
      throw ValidationError("integrability: the zero-frequency moment needs decay power above 2N");
    }
    hint = DecayHint::polynomial(p - (2.0 * N - 1.0));
  }
  const double power = 2.0 * N - 1.0;
  auto w = [&](double r) { return (power == 0.0 ? 1.0 : std::pow(r, power)) * f(r); };
  return zonal_integral(w, N, y, hint, cfg);
}

double radial_fourier(const RadialFunction& f, double N, double y, const QuadratureConfig& cfg) {
  return radial_fourier_detailed(f, N, y, cfg).value;
}

namespace {

// Decay hint attached to a transformed distribution.
DecayHint transformed_hint(const WeightDistribution& A) {
  if (A.discrete().empty() && A.continuous() && A.continuous()->decay().kind == DecayHint::Kind::gaussian) {
    return A.continuous()->decay();
  }
  // Transforms of combs or compactly supported inputs oscillate without decaying.
  return DecayHint::polynomial(0.5);
}

double comb_transform(const WeightDistribution& A, double r) {
  const double N = A.N();
  const double rp = std::pow(r, 2.0 * N - 1.0);
  double s = 0.0;
  for (const auto& d : A.discrete()) s += d.mass * zonal(N, r * d.location);
  return rp * s;
}

// Continuous part evaluated at r, with a truncation radius fixed in advance.
double continuous_transform(const WeightDistribution& A, double r, const QuadratureConfig& cfg) {
  if (!A.continuous()) return 0.0;
  const RadialFunction& a = *A.continuous();
  const double N = A.N();
  if (a.decay().kind == DecayHint::Kind::polynomial && !(a.decay().param > N + 1.0)) {
    throw ValidationError("integrability: decay power of the input distribution must exceed N + 1");
  }
  const auto res = zonal_integral([&](double x) { return a(x); }, N, r, a.decay(), cfg);
  return std::pow(r, 2.0 * N - 1.0) * res.value;
}

QuadratureConfig with_fixed_truncation(const WeightDistribution& A, QuadratureConfig cfg) {
  cfg.validate();
  if (cfg.truncation == 0.0 && A.continuous() && A.continuous()->decay().kind == DecayHint::Kind::gaussian) {
    const RadialFunction& a = *A.continuous();
    cfg.truncation = gaussian_truncation([&](double x) { return a(x); }, a.decay().param, cfg);
  }
  return cfg;
}

}  // namespace

WeightDistribution macwilliams_transform(const WeightDistribution& A, std::span<const double> r_grid,
                                         const QuadratureConfig& cfg) {
  if (r_grid.size() < 2) throw ValidationError("transform grid needs at least two points");
  const QuadratureConfig fixed = with_fixed_truncation(A, cfg);
  std::vector<double> r(r_grid.begin(), r_grid.end());
  std::vector<double> values(r.size());
  parallel_for(r.size(), [&](std::size_t i) {
    if (!(r[i] >= 0.0)) throw ValidationError("transform grid must be non-negative");
    values[i] = continuous_transform(A, r[i], fixed) + comb_transform(A, r[i]);
  });
  auto out = RadialFunction::sampled(std::move(r), std::move(values), transformed_hint(A));
  return WeightDistribution(A.N(), out, {}, {{"transform_of", A.continuous() ? A.continuous()->tag() : "comb"}});
}

RadialFunction macwilliams_function(const WeightDistribution& A, const QuadratureConfig& cfg) {
  const QuadratureConfig fixed = with_fixed_truncation(A, cfg);
  return RadialFunction::closed_form(
      "macwilliams", {A.N()},
      [A, fixed](double r) { return continuous_transform(A, r, fixed) + comb_transform(A, r); },
      transformed_hint(A));
}

double involution_residual(const WeightDistribution& A, std::span<const double> r_grid, const QuadratureConfig& cfg) {
  if (!A.continuous() || A.continuous()->decay().kind != DecayHint::Kind::gaussian || !A.discrete().empty()) {
    throw ValidationError("involution residual needs a purely continuous distribution with gaussian decay");
  }
  // Sample the forward transform densely once; transforming a lazily
  // evaluated B would nest one quadrature inside another.
  // The transform can reach further out than A does (the cat code's B has a
  // peak at 2 alpha), so the sampling range grows until B has decayed.
  const QuadratureConfig forward = with_fixed_truncation(A, cfg);
  const double h = std::min(0.01, 0.25 * cfg.max_panel_width);
  double reach = forward.truncation;
  std::optional<WeightDistribution> sampled;
  for (;;) {
    const auto n = static_cast<std::size_t>(std::ceil(reach / h)) + 1;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) grid[i] = std::min(reach, static_cast<double>(i) * h);
    grid.back() = reach;
    sampled = macwilliams_transform(A, grid, forward);
    const auto values = sampled->continuous()->values();
    double tail = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (grid[i] >= reach - 1.0) tail = std::max(tail, std::abs(values[i]));
    if (tail <= cfg.tail_tolerance) break;
    reach *= 1.5;
    if (reach > cfg.max_truncation) {
      throw AccuracyError("involution residual: transform does not decay before max_truncation", 0.0, tail);
    }
  }
  const WeightDistribution& sampled_B = *sampled;
  const WeightDistribution B(A.N(), RadialFunction::sampled(std::vector<double>(sampled_B.continuous()->abscissae().begin(),
                                                                                sampled_B.continuous()->abscissae().end()),
                                                            std::vector<double>(sampled_B.continuous()->values().begin(),
                                                                                sampled_B.continuous()->values().end()),
                                                            DecayHint::compact(reach)));
  QuadratureConfig fixed = forward;
  fixed.truncation = reach;
  std::vector<double> diff(r_grid.size()), ref(r_grid.size());
  parallel_for(r_grid.size(), [&](std::size_t i) {
    const double back = continuous_transform(B, r_grid[i], fixed);
    ref[i] = std::abs(A.density(r_grid[i]));
    diff[i] = std::abs(back - A.density(r_grid[i]));
  });
  const double scale = ref.empty() ? 0.0 : *std::max_element(ref.begin(), ref.end());
  const double worst = diff.empty() ? 0.0 : *std::max_element(diff.begin(), diff.end());
  if (scale == 0.0) return worst;
  return worst / scale;
}

std::complex<double> zonal_surface_integral(int N, double r, std::span<const double> eta, int nodes) {
  if (N != 1 && N != 2) throw ValidationError("zonal surface integral supports N = 1 or N = 2 only");
  if (static_cast<int>(eta.size()) != 2 * N) throw ValidationError("eta must have 2N components");
  if (!(r > 0.0)) throw ValidationError("sphere radius must be positive");
  double norm2 = 0.0;
  for (double e : eta) norm2 += e * e;
  const double eta_norm = std::sqrt(norm2);
  // Omega eta, with Omega = [[0, I], [-I, 0]] in (q_1..q_N, p_1..p_N) ordering.
  std::vector<double> oe(2 * N);
  for (int i = 0; i < N; ++i) {
    oe[i] = eta[N + i];
    oe[N + i] = -eta[i];
  }
  auto phase = [&](std::span<const double> xi) {
    double s = 0.0;
    for (int i = 0; i < 2 * N; ++i) s += xi[i] * oe[i];
    return std::complex<double>(std::cos(s), -std::sin(s));
  };
  std::complex<double> total = 0.0;
  if (N == 1) {
    const int n = nodes > 0 ? nodes : std::max(128, static_cast<int>(4.0 * r * eta_norm) + 64);
    for (int k = 0; k < n; ++k) {
      const double th = 2.0 * kPi * k / n;
      const double xi[2] = {r * std::cos(th), r * std::sin(th)};
      total += phase(xi);
    }
    total *= 2.0 * kPi * r / n;
    return total / (2.0 * kPi * r);
  }
  // S^3 in Hopf coordinates: measure r^3 sin a cos a da db1 db2.
  const int n = nodes > 0 ? nodes : std::max(48, static_cast<int>(2.0 * r * eta_norm) + 32);
  const GaussRule& rule = gauss_legendre(std::min(n, 512));
  const int m = 2 * n;
  for (std::size_t ia = 0; ia < rule.nodes.size(); ++ia) {
    const double a = 0.25 * kPi * (rule.nodes[ia] + 1.0);
    const double wa = 0.25 * kPi * rule.weights[ia] * std::sin(a) * std::cos(a);
    for (int i1 = 0; i1 < m; ++i1) {
      const double b1 = 2.0 * kPi * i1 / m;
      for (int i2 = 0; i2 < m; ++i2) {
        const double b2 = 2.0 * kPi * i2 / m;
        const double xi[4] = {r * std::cos(a) * std::cos(b1), r * std::sin(a) * std::cos(b2),
                              r * std::cos(a) * std::sin(b1), r * std::sin(a) * std::sin(b2)};
        total += wa * phase(xi);
      }
    }
  }
  total *= std::pow(r, 3) * (2.0 * kPi / m) * (2.0 * kPi / m);
  return total * eta_norm / std::pow(2.0 * kPi * r, 2);
}

}  // namespace cvmw
