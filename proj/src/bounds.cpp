#include "cvmw/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cvmw/distribution.hpp"
#include "cvmw/errors.hpp"
#include "cvmw/parallel.hpp"
#include "cvmw/quadrature.hpp"
#include "cvmw/specfun.hpp"

namespace cvmw {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kProductZeros = 64;
// Below this distance from x = 1 the product form replaces the quotient form of f.
constexpr double kProductWindow = 1e-3;

// int_0^a sin^m(phi) dphi for integer m >= 0.
double sine_power_integral(int m, double a) {
  double lower = a;                 // m = 0
  double upper = 1.0 - std::cos(a); // m = 1
  if (m == 0) return lower;
  if (m == 1) return upper;
  const double s = std::sin(a), c = std::cos(a);
  double prev2 = lower, prev1 = upper;
  double sp = 1.0;  // sin^{k-1}
  double cur = 0.0;
  for (int k = 2; k <= m; ++k) {
    sp *= s;  // now sin^{k-1}
    cur = -sp * c / k + (k - 1.0) / k * prev2;
    prev2 = prev1;
    prev1 = cur;
  }
  return cur;
}

// Fraction of the sphere of radius r about the origin in R^n that lies inside
// the ball of radius j centred at y e_1.
double sphere_fraction(int n, double r, double y, double j) {
  if (r == 0.0 || y == 0.0) return (std::abs(r - y) <= j) ? 1.0 : 0.0;
  if (n == 1) {
    const double plus = std::abs(r - y) <= j ? 1.0 : 0.0;
    const double minus = (r + y) <= j ? 1.0 : 0.0;
    return 0.5 * (plus + minus);
  }
  const double t = (r * r + y * y - j * j) / (2.0 * r * y);
  if (t <= -1.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const int m = n - 2;
  return sine_power_integral(m, std::acos(t)) / sine_power_integral(m, kPi);
}

}  // namespace

LevenshteinFunction::LevenshteinFunction(double N) : N_(checked_modes(N)) {
  const BesselOrder order(N_);
  j_ = bessel_zero(order, 1);
  c_ = std::pow(2.0, N_) * factorial(N_) / std::pow(j_, 2.0 * N_);
  phi_j_ = zonal(N_, j_);
  zeros_.resize(kProductZeros);
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (int k = 0; k < kProductZeros; ++k) {
    zeros_[k] = bessel_zero(order, k + 1);
    const double inv2 = 1.0 / (zeros_[k] * zeros_[k]);
    s1 += inv2;
    s2 += inv2 * inv2;
    s3 += inv2 * inv2 * inv2;
  }
  // Rayleigh sums sigma_m = sum_k j_{N,k}^{-2m} in closed form.
  const double n1 = N_ + 1.0;
  tail1_ = 1.0 / (4.0 * n1) - s1;
  tail2_ = 1.0 / (16.0 * n1 * n1 * (N_ + 2.0)) - s2;
  tail3_ = 1.0 / (32.0 * n1 * n1 * n1 * (N_ + 2.0) * (N_ + 3.0)) - s3;
}

double LevenshteinFunction::f_product(double x) const {
  const double z2 = j_ * j_ * x * x;
  double p = 1.0;
  for (int k = 1; k < kProductZeros; ++k) p *= 1.0 - z2 / (zeros_[k] * zeros_[k]);
  // log prod_{k > 64} (1 - u_k) = -sum u_k - sum u_k^2 / 2 - sum u_k^3 / 3 - ...
  p *= std::exp(-z2 * tail1_ - z2 * z2 * tail2_ / 2.0 - z2 * z2 * z2 * tail3_ / 3.0);
  return (1.0 - x * x) * p * p;
}

double LevenshteinFunction::ghat(double x) const {
  if (!(x >= 0.0)) throw ValidationError("Levenshtein functions take x >= 0");
  if (std::abs(x - 1.0) < kProductWindow) {
    const double z2 = j_ * j_ * x * x;
    double p = 1.0;
    for (int k = 1; k < kProductZeros; ++k) p *= 1.0 - z2 / (zeros_[k] * zeros_[k]);
    return p * std::exp(-z2 * tail1_ - z2 * z2 * tail2_ / 2.0 - z2 * z2 * z2 * tail3_ / 3.0);
  }
  const double scale = factorial(N_) * std::pow(2.0, N_);
  return scale * zonal(N_ + 1.0, j_ * x) / (1.0 - x * x);
}

double LevenshteinFunction::f(double x) const {
  if (!(x >= 0.0)) throw ValidationError("Levenshtein functions take x >= 0");
  if (std::abs(x - 1.0) < kProductWindow) return f_product(x);
  const double scale = factorial(N_) * std::pow(2.0, N_);
  const double phi = zonal(N_ + 1.0, j_ * x);
  return scale * scale * phi * phi / (1.0 - x * x);
}

double LevenshteinFunction::g(double x) const {
  if (!(x >= 0.0)) throw ValidationError("Levenshtein functions take x >= 0");
  if (x >= j_) return 0.0;
  return c_ * (1.0 - zonal(N_, x) / phi_j_);
}

IntegralResult LevenshteinFunction::fhat_hankel(double y, const QuadratureConfig& cfg) const {
  const LevenshteinFunction self = *this;
  const auto fn = RadialFunction::closed_form("levenshtein_f", {N_}, [self](double x) { return self.f(x); },
                                              DecayHint::polynomial(2.0 * N_ + 3.0));
  return radial_fourier_detailed(fn, N_, y, cfg);
}

double LevenshteinFunction::fhat_convolution(double y) const {
  if (!(y >= 0.0) || !std::isfinite(y)) throw ValidationError("transform argument must be finite and >= 0");
  if (y >= 2.0 * j_) return 0.0;
  const int n = static_cast<int>(std::lround(2.0 * N_));
  const double r0 = std::abs(j_ - y);
  auto shell = [&](double r) { return g(r) * sphere_area(n - 1, r); };
  constexpr int kPanels = 24;
  double total = 0.0;
  if (y < j_) total += integrate_composite(shell, 0.0, r0, kPanels, 16);
  // On [r0, j] the covered fraction has a (r - r0)^{N - 1/2} edge; r = r0 + w u^2
  // turns it into a smooth integrand in u.
  const double w = j_ - r0;
  if (w > 0.0) {
    total += integrate_composite(
        [&](double u) {
          const double r = r0 + w * u * u;
          return shell(r) * sphere_fraction(n, r, y, j_) * 2.0 * w * u;
        },
        0.0, 1.0, kPanels, 16);
  }
  return c_ * std::pow(2.0 * kPi, -N_) * total;
}

double LevenshteinFunction::fhat(double y, const QuadratureConfig& cfg) const {
  // The transform is of size c, which is tiny for many modes, so an absolute
  // tail tolerance is tightened to the scale of c.
  QuadratureConfig scaled = cfg;
  scaled.tail_tolerance = std::min(cfg.tail_tolerance, 1e-12 * c_);
  const double primary = fhat_hankel(y, scaled).value;
  const double check = fhat_convolution(y);
  if (std::abs(primary - check) > 1e-5 * c_) {
    std::ostringstream msg;
    msg << std::setprecision(12) << "Levenshtein transform routes disagree at y = " << y << ": Hankel " << primary
        << " vs convolution " << check;
    throw ConsistencyError(msg.str());
  }
  return primary;
}

double lev_f(double N, double x) { return LevenshteinFunction(N).f(x); }
double lev_g(double N, double x) { return LevenshteinFunction(N).g(x); }
double lev_fhat(double N, double y, const QuadratureConfig& cfg) { return LevenshteinFunction(N).fhat(y, cfg); }

AuxFunctionTable::AuxFunctionTable(std::vector<double> x, std::vector<double> f, std::vector<double> fhat,
                                   std::string source, InterpOrder order)
    : x_(std::move(x)), f_(std::move(f)), fhat_(std::move(fhat)), source_(std::move(source)) {
  if (x_.size() < 4) throw ValidationError("auxiliary table needs at least four samples");
  if (f_.size() != x_.size() || fhat_.size() != x_.size()) throw ValidationError("auxiliary table columns differ in length");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(f_[i]) || !std::isfinite(fhat_[i])) {
      throw ValidationError("auxiliary table has non-finite entries");
    }
    if (i > 0 && !(x_[i] > x_[i - 1])) throw ValidationError("auxiliary table abscissae must be strictly increasing");
  }
  if (x_.front() != 0.0) throw CoverageError("auxiliary table must start at x = 0");
  fi_ = Interpolant(x_, f_, order);
  fhi_ = Interpolant(x_, fhat_, order);
}

double AuxFunctionTable::f(double x) const {
  if (x < 0.0 || x > x_.back()) {
    std::ostringstream msg;
    msg << "auxiliary table covers [0, " << x_.back() << "], f needed at " << x;
    throw CoverageError(msg.str());
  }
  return fi_(x);
}

double AuxFunctionTable::fhat(double x) const {
  if (x < 0.0 || x > x_.back()) {
    std::ostringstream msg;
    msg << "auxiliary table covers [0, " << x_.back() << "], fhat needed at " << x;
    throw CoverageError(msg.str());
  }
  return fhi_(x);
}

double AuxFunctionTable::sign_change() const {
  for (std::size_t i = 0; i < x_.size(); ++i)
    if (f_[i] <= 0.0) return x_[i];
  return std::numeric_limits<double>::infinity();
}

void AuxFunctionTable::check_signs(double d) const {
  constexpr double kTol = 1e-12;
  for (std::size_t i = 0; i < x_.size(); ++i) {
    std::ostringstream msg;
    msg << std::setprecision(12);
    if (fhat_[i] < -kTol) {
      msg << "auxiliary function invalid: fhat(" << x_[i] << ") = " << fhat_[i] << " is negative";
      throw InvalidAuxiliaryError(msg.str(), x_[i]);
    }
    if (x_[i] < d && f_[i] < -kTol) {
      msg << "auxiliary function invalid: f(" << x_[i] << ") = " << f_[i] << " is negative below d = " << d;
      throw InvalidAuxiliaryError(msg.str(), x_[i]);
    }
    if (x_[i] >= d && f_[i] > kTol) {
      msg << "auxiliary function invalid: f(" << x_[i] << ") = " << f_[i] << " is positive at or beyond d = " << d;
      throw InvalidAuxiliaryError(msg.str(), x_[i]);
    }
  }
}

double AuxFunctionTable::interpolation_error(double x_hi) const {
  std::vector<double> xe, fe, he;
  for (std::size_t i = 0; i < x_.size(); i += 2) {
    xe.push_back(x_[i]);
    fe.push_back(f_[i]);
    he.push_back(fhat_[i]);
  }
  if (xe.size() < 3) return std::numeric_limits<double>::infinity();
  const Interpolant fh(xe, fe, fi_.order()), hh(xe, he, fhi_.order());
  double fmax = 0.0, hmax = 0.0, ferr = 0.0, herr = 0.0;
  for (std::size_t i = 0; i < x_.size() && x_[i] <= x_hi; ++i) {
    fmax = std::max(fmax, std::abs(f_[i]));
    hmax = std::max(hmax, std::abs(fhat_[i]));
    if (i % 2 == 1 && x_[i] <= xe.back()) {
      ferr = std::max(ferr, std::abs(fh(x_[i]) - f_[i]));
      herr = std::max(herr, std::abs(hh(x_[i]) - fhat_[i]));
    }
  }
  // Halving the spacing divides the error by 2^4 (cubic) or 2^2 (linear).
  const double gain = fi_.order() == InterpOrder::cubic ? 16.0 : 4.0;
  const double rf = fmax > 0.0 ? ferr / fmax : 0.0;
  const double rh = hmax > 0.0 ? herr / hmax : 0.0;
  return std::max(rf, rh) / gain;
}

AuxFunctionTable read_aux_table(std::istream& in, std::string source, InterpOrder order) {
  std::string line;
  bool header = false;
  std::vector<double> x, f, h;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "x,f,fhat") throw ValidationError("auxiliary table header must be 'x,f,fhat'");
      header = true;
      continue;
    }
    std::stringstream ss(line);
    ss.imbue(std::locale::classic());
    double a = 0, b = 0, c = 0;
    char c1 = 0, c2 = 0;
    if (!(ss >> a >> c1 >> b >> c2 >> c) || c1 != ',' || c2 != ',') {
      throw ValidationError("auxiliary table line " + std::to_string(line_no) + " is not 'x,f,fhat'");
    }
    x.push_back(a);
    f.push_back(b);
    h.push_back(c);
  }
  if (!header) throw ValidationError("auxiliary table is empty");
  return AuxFunctionTable(std::move(x), std::move(f), std::move(h), std::move(source), order);
}

void write_aux_table(std::ostream& out, const AuxFunctionTable& t) {
  out << "x,f,fhat\n" << std::setprecision(17);
  for (std::size_t i = 0; i < t.x().size(); ++i)
    out << t.x()[i] << ',' << t.f_samples()[i] << ',' << t.fhat_samples()[i] << '\n';
}

AuxFunctionTable levenshtein_table(double N, double d, double x_max, int n) {
  if (!(d > 0.0) || !(x_max > 0.0) || n < 4) throw ValidationError("levenshtein_table needs d > 0, x_max > 0, n >= 4");
  const LevenshteinFunction lev(N);
  std::vector<double> x(n), f(n), h(n);
  const double scale = std::pow(d, 2.0 * N);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    x[i] = x_max * static_cast<double>(i) / (n - 1);
    f[i] = lev.f(x[i] / d);
    h[i] = scale * lev.fhat_convolution(d * x[i]);
  });
  std::ostringstream src;
  src << "levenshtein N=" << N << " d=" << std::setprecision(17) << d;
  return AuxFunctionTable(std::move(x), std::move(f), std::move(h), src.str());
}

namespace {

BoundResult quotient_supremum(const std::function<double(double)>& f, const std::function<double(double)>& fhat,
                              double d, double eps, std::span<const double> grid) {
  if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("distance d must be positive and finite");
  if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("eps must lie in [0, 1)");
  std::vector<double> pts;
  if (grid.empty()) {
    constexpr int kDefault = 4096;
    pts.resize(kDefault);
    for (int i = 0; i < kDefault; ++i) pts[i] = d * i / (kDefault - 1);
  } else {
    for (double x : grid) {
      if (x < 0.0 || x > d) throw ValidationError("bound grid must lie in [0, d]");
      pts.push_back(x);
    }
    std::sort(pts.begin(), pts.end());
  }
  std::vector<double> fv(pts.size()), hv(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    fv[i] = f(pts[i]);
    hv[i] = fhat(pts[i]);
  });
  double hmax = 0.0;
  for (double h : hv) hmax = std::max(hmax, h);
  const double floor_h = 1e-14 * hmax;
  BoundResult res;
  std::size_t best = pts.size();
  double best_q = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(hv[i] > floor_h)) {
      ++res.excluded;
      res.excluded_points.push_back(pts[i]);
      continue;
    }
    const double q = fv[i] / hv[i];
    if (q > best_q) {
      best_q = q;
      best = i;
    }
  }
  if (best == pts.size()) throw NumericalError("bound evaluation: fhat is negligible on the whole grid");
  res.attained_at = pts[best];
  const double lo = best > 0 ? pts[best - 1] : pts[best];
  const double hi = best + 1 < pts.size() ? pts[best + 1] : pts[best];
  if (hi > lo) {
    auto q = [&](double x) {
      const double h = fhat(x);
      return h > floor_h ? f(x) / h : -std::numeric_limits<double>::infinity();
    };
    const auto m = golden_section_max(q, lo, hi, 1e-12 * std::max(1.0, d));
    res.bracket_width = m.bracket_width;
    if (m.value > best_q) {
      best_q = m.value;
      res.attained_at = m.x;
    }
  }
  res.sup = best_q;
  res.K_max = best_q / (1.0 - eps);
  return res;
}

}  // namespace

BoundResult cohn_elkies_bound(const AuxFunctionTable& table, double N, double d, double eps,
                              std::span<const double> grid) {
  checked_modes(N);
  if (table.x_max() < d) {
    std::ostringstream msg;
    msg << "auxiliary table ends at " << table.x_max() << " but the bound needs [0, " << d << "]";
    throw CoverageError(msg.str());
  }
  table.check_signs(d);
  return quotient_supremum([&](double x) { return table.f(x); }, [&](double x) { return table.fhat(x); }, d, eps,
                           grid);
}

BoundResult cohn_elkies_bound_scaled(const std::function<double(double)>& f, const std::function<double(double)>& fhat,
                                     double N, double d, double eps, std::span<const double> grid) {
  checked_modes(N);
  const double scale = std::pow(d, 2.0 * N);
  return quotient_supremum([&](double x) { return f(x / d); }, [&](double x) { return scale * fhat(d * x); }, d, eps,
                           grid);
}

double levenshtein_bound(double N, double d, double eps) {
  checked_modes(N);
  if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("distance d must be positive and finite");
  if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("eps must lie in [0, 1)");
  const double dp = d_plus(N);
  if (d > dp) {
    std::ostringstream msg;
    msg << std::setprecision(12) << "d = " << d << " exceeds the validity threshold d_plus = " << dp;
    throw ValidityError(msg.str(), dp);
  }
  const double j = bessel_zero(BesselOrder(N), 1);
  return std::pow(j, 2.0 * N) / ((1.0 - eps) * factorial(N) * std::pow(2.0, N) * std::pow(d, 2.0 * N));
}

double levenshtein_distance_for(double N, double K) {
  checked_modes(N);
  if (!(K > 0.0)) throw ValidationError("code size must be positive");
  const double j = bessel_zero(BesselOrder(N), 1);
  return j / std::pow(factorial(N) * std::pow(2.0, N) * K, 1.0 / (2.0 * N));
}

double d_plus(double N) {
  checked_modes(N);
  if (N == 0.5) return std::pow(12.0 * kPi, 1.0 / 6.0);
  const double j = bessel_zero(BesselOrder(N), 1);
  const double jm1 = std::abs(bessel_j(BesselOrder(N - 1.0), j));
  const double num = 16.0 * factorial(N) * jm1;
  const double den = 3.0 * std::sqrt(kPi) * gamma_fn((2.0 * N - 1.0) / 2.0) * std::pow(j, N - 2.0);
  return std::pow(num / den, 1.0 / 6.0);
}

SupremumCheck lemma2_supremum_check(double N, double d, std::span<const double> grid) {
  const LevenshteinFunction lev(N);
  if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("distance d must be positive and finite");
  std::vector<double> pts;
  if (grid.empty()) {
    constexpr int kDefault = 4096;
    pts.resize(kDefault);
    for (int i = 0; i < kDefault; ++i) pts[i] = d * i / (kDefault - 1);
  } else {
    pts.assign(grid.begin(), grid.end());
    std::sort(pts.begin(), pts.end());
    if (pts.front() != 0.0) pts.insert(pts.begin(), 0.0);
  }
  std::vector<double> fv(pts.size()), hv(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    fv[i] = lev.f(pts[i] / d);
    hv[i] = lev.fhat_convolution(pts[i] * d);
  });
  double hmax = 0.0;
  for (double h : hv) hmax = std::max(hmax, h);
  SupremumCheck res;
  res.within_guarantee = d <= d_plus(N);
  res.origin_value = fv[0] / hv[0];
  res.sup = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(hv[i] > 1e-14 * hmax)) {
      ++res.excluded;
      continue;
    }
    const double q = fv[i] / hv[i];
    if (q > res.sup) {
      res.sup = q;
      res.attained_at = pts[i];
    }
  }
  res.at_origin = res.sup <= res.origin_value * (1.0 + 1e-9);
  return res;
}

double quad_bound_constant(double N) {
  checked_modes(N);
  if (N < 1.0) throw ValidationError("the quadratic bound constant needs N >= 1");
  const double j = bessel_zero(BesselOrder(N), 1);
  return 9.0 / (2.0 * std::pow(j, N + 1.0) * std::abs(bessel_j(BesselOrder(N - 1.0), j)));
}

MagicQuotient magic_quotient_check(const AuxFunctionTable& table, MagicFamily family, double d, int grid_points) {
  if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("distance d must be positive and finite");
  if (grid_points < 16) throw ValidationError("magic quotient grid needs at least 16 points");
  const double s = family == MagicFamily::e8 ? std::sqrt(2.0) : 2.0;
  const double dims = family == MagicFamily::e8 ? 4.0 : 12.0;
  const double needed = std::max(s, d * d / s);
  if (table.x_max() < needed) {
    std::ostringstream msg;
    msg << "magic table ends at " << table.x_max() << " but the quotient needs abscissae up to " << needed;
    throw CoverageError(msg.str());
  }
  MagicQuotient res;
  res.reference = std::pow(2.0 * kPi, dims);
  res.interpolation_error = table.interpolation_error(needed);
  if (res.interpolation_error > 1e-4) {
    std::ostringstream msg;
    msg << "magic table too coarse: interpolation error estimate " << res.interpolation_error << " exceeds 1e-4";
    throw CoverageError(msg.str());
  }
  auto fq = [&](double x) { return table.f(s * x); };
  auto hq = [&](double x) { return table.fhat(d * d * x / s); };
  // Reuse the quotient scan on [0, 1] (the distance argument sets the interval).
  std::vector<double> grid(grid_points);
  for (int i = 0; i < grid_points; ++i) grid[i] = static_cast<double>(i) / (grid_points - 1);
  const BoundResult br = quotient_supremum(fq, hq, 1.0, 0.0, grid);
  res.sup = br.sup;
  res.attained_at = br.attained_at;
  res.relative_excess = res.sup / res.reference - 1.0;
  res.x = grid;
  res.quotient.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double h = hq(grid[i]);
    res.quotient[i] = h != 0.0 ? fq(grid[i]) / h : std::numeric_limits<double>::quiet_NaN();
  }
  return res;
}

}  // namespace cvmw
