#include "cvmw/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "cvmw/errors.hpp"

namespace cvmw {

namespace {

constexpr double kPi = std::numbers::pi;

// Power series sum_k (-1)^k (x/2)^{2k} / (k! Gamma(k + nu + 1)), i.e. J_nu(x) / (x/2)^nu.
double reduced_series(double nu, double x) {
  const double q = 0.25 * x * x;
  double term = std::exp(-std::lgamma(nu + 1.0));
  double sum = term;
  for (int k = 0; k < 500; ++k) {
    term *= -q / ((k + 1.0) * (k + 1.0 + nu));
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum) && k > q) break;
  }
  return sum;
}

double series_j(double nu, double x) {
  if (x == 0.0) {
    if (nu == 0.0) return 1.0;
    return nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::exp(nu * std::log(0.5 * x)) * reduced_series(nu, x);
}

// Hankel's expansion for x >> nu^2.
double asymptotic_j(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0, q = 0.0;
  double term = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(term) >= last) break;
    last = std::abs(term);
    // k odd feeds Q, k even feeds P, with alternating signs in each.
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      default: p += term; break;
    }
    if (std::abs(term) < 1e-17) break;
  }
  const double chi = x - (0.5 * nu + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

// Miller's backward recurrence normalized with J_0 + 2 sum J_{2k} = 1.
double miller_j(int n, double x) {
  const int start_base = std::max(n, static_cast<int>(x)) + 20 + static_cast<int>(std::sqrt(40.0 * std::max<double>(n, x)));
  const int m = 2 * (start_base / 2 + 1);
  double jp1 = 0.0, j = 1e-300, wanted = 0.0, norm = 0.0;
  for (int k = m; k > 0; --k) {
    const double jm1 = (2.0 * k / x) * j - jp1;
    jp1 = j;
    j = jm1;
    if (k - 1 == n) wanted = j;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * j;
    if (std::abs(j) > 1e250) {
      j *= 1e-250;
      jp1 *= 1e-250;
      wanted *= 1e-250;
      norm *= 1e-250;
    }
  }
  norm += j;  // J_0 term
  return wanted / norm;
}

// J_{m+1/2}(x) = sqrt(2x/pi) j_m(x), with spherical Bessel j_m from the
// trigonometric seeds j_{-1} = cos x / x and j_0 = sin x / x.
double half_integer_trig(int twice_nu, double x) {
  const double s = std::sin(x), c = std::cos(x);
  const double pref = std::sqrt(2.0 / (kPi * x));
  if (twice_nu == -1) return pref * c;
  if (twice_nu == 1) return pref * s;
  const int m = (twice_nu - 1) / 2;
  double jm1 = c / x, j0 = s / x;
  for (int l = 0; l < m; ++l) {
    const double next = (2.0 * l + 1.0) / x * j0 - jm1;
    jm1 = j0;
    j0 = next;
  }
  return pref * x * j0;
}

struct ZeroCache {
  std::mutex mutex;
  std::map<int, std::vector<double>> zeros;
};

ZeroCache& zero_cache() {
  static ZeroCache cache;
  return cache;
}

double bisect_zero(BesselOrder nu, double a, double b) {
  double fa = bessel_j(nu, a);
  for (int it = 0; it < 200 && b - a > 4e-16 * b; ++it) {
    const double mid = 0.5 * (a + b);
    const double fm = bessel_j(nu, mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

BesselOrder::BesselOrder(double nu) {
  const double twice = 2.0 * nu;
  if (!std::isfinite(nu) || std::abs(twice - std::round(twice)) > 1e-12 || nu < -0.5) {
    throw OrderDomainError("Bessel order must be an integer or half-integer >= -1/2, got " + std::to_string(nu));
  }
  twice_ = static_cast<int>(std::lround(twice));
}

BesselOrder BesselOrder::from_twice(int twice_nu) {
  if (twice_nu < -1) throw OrderDomainError("Bessel order below -1/2");
  BesselOrder o;
  o.twice_ = twice_nu;
  return o;
}

double bessel_j(BesselOrder order, double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw ValidationError("bessel_j needs finite x >= 0");
  const double nu = order.value();
  if (order.is_half_integer()) {
    if (x == 0.0) return series_j(nu, x);
    if (order.twice() == 1 || order.twice() == -1 || x >= nu + 1.0) return half_integer_trig(order.twice(), x);
    return series_j(nu, x);
  }
  if (x <= std::max(12.0, 2.0 * nu)) return series_j(nu, x);
  if (x > 25.0 + nu * nu) return asymptotic_j(nu, x);
  return miller_j(order.twice() / 2, x);
}

double bessel_j(double nu, double x) { return bessel_j(BesselOrder(nu), x); }

double bessel_zero(BesselOrder nu, int k) {
  if (k < 1) throw ValidationError("Bessel zero index must be >= 1");
  auto& cache = zero_cache();
  {
    std::lock_guard lock(cache.mutex);
    auto it = cache.zeros.find(nu.twice());
    if (it != cache.zeros.end() && static_cast<int>(it->second.size()) >= k) return it->second[k - 1];
  }
  // Compute outside the lock; consecutive zeros are at least ~2.4 apart for
  // orders >= -1/2, so a 0.25 scan step cannot skip a sign change.
  std::vector<double> found;
  {
    std::lock_guard lock(cache.mutex);
    auto it = cache.zeros.find(nu.twice());
    if (it != cache.zeros.end()) found = it->second;
  }
  const double step = 0.25;
  double x = found.empty() ? std::max(nu.value(), 0.05) : found.back() + 1e-3;
  double fx = bessel_j(nu, x);
  while (static_cast<int>(found.size()) < k) {
    const double xn = x + step;
    const double fn = bessel_j(nu, xn);
    if (fn == 0.0) {
      found.push_back(xn);
      x = xn + 1e-3;
      fx = bessel_j(nu, x);
      continue;
    }
    if ((fn > 0.0) != (fx > 0.0)) {
      const double z = bisect_zero(nu, x, xn);
      found.push_back(z);
      x = z + 1e-3;
      fx = bessel_j(nu, x);
      continue;
    }
    x = xn;
    fx = fn;
  }
  std::lock_guard lock(cache.mutex);
  auto& slot = cache.zeros[nu.twice()];
  if (slot.size() < found.size()) slot = found;
  return slot[k - 1];
}

double bessel_zero(double nu, int k) { return bessel_zero(BesselOrder(nu), k); }

double bessel_i0_scaled(double x) {
  if (!(x >= 0.0)) throw ValidationError("bessel_i0 needs x >= 0");
  if (x <= 30.0) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 400; ++k) {
      term *= q / (static_cast<double>(k) * k);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return std::exp(-x) * sum;
  }
  double term = 1.0, sum = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double ratio = (2.0 * k + 1.0) * (2.0 * k + 1.0) / ((k + 1.0) * 8.0 * x);
    if (ratio >= 1.0) break;
    term *= ratio;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum / std::sqrt(2.0 * kPi * x);
}

double bessel_i0(double x) {
  if (x > 700.0) throw ValidationError("bessel_i0 overflows for x > 700");
  return std::exp(x) * bessel_i0_scaled(x);
}

double laguerre(int n, double x) {
  if (n < 0) throw ValidationError("Laguerre degree must be non-negative");
  if (n > 10000) throw ValidationError("Laguerre degree above 10000 is not supported");
  if (n == 0) return 1.0;
  double lm1 = 1.0, l = 1.0 - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - x) * l - k * lm1) / (k + 1.0);
    lm1 = l;
    l = next;
  }
  return l;
}

double gamma_fn(double x) {
  if (!(x > 0.0)) throw ValidationError("gamma_fn needs a positive argument");
  return std::tgamma(x);
}

double beta_fn(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("beta_fn needs positive arguments");
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double factorial(double n) { return gamma_fn(n + 1.0); }

double sphere_area(int k, double r) {
  if (k < 0) throw ValidationError("sphere dimension must be >= 0");
  const double h = 0.5 * (k + 1);
  return 2.0 * std::pow(kPi, h) * std::pow(r, k) / std::tgamma(h);
}

double zonal_at_origin(double N) { return 1.0 / (std::pow(2.0, N - 1.0) * std::tgamma(N)); }

double zonal(double N, double x) {
  const BesselOrder order(N - 1.0);
  if (N < 0.5) throw OrderDomainError("zonal needs N >= 1/2");
  if (!(x >= 0.0)) throw ValidationError("zonal needs x >= 0");
  const double nu = N - 1.0;
  if (order.twice() == -1) return std::sqrt(2.0 / kPi) * std::cos(x);
  bool use_series;
  if (order.is_half_integer()) {
    use_series = x < nu + 1.0;
  } else {
    use_series = x <= std::max(12.0, 2.0 * nu);
  }
  if (use_series) return std::pow(2.0, -nu) * reduced_series(nu, x);
  return bessel_j(order, x) / std::pow(x, nu);
}

}  // namespace cvmw
