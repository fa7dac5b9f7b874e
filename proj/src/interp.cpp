#include "cvmw/interp.hpp"

#include <algorithm>
#include <cmath>

#include "cvmw/errors.hpp"

namespace cvmw {

Interpolant::Interpolant(std::span<const double> x, std::span<const double> y, InterpOrder order)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()), order_(order) {
  if (x_.size() != y_.size()) throw ValidationError("interpolant: abscissae and values differ in length");
  if (x_.size() < 2) throw ValidationError("interpolant: need at least two samples");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(y_[i])) throw ValidationError("interpolant: non-finite sample");
    if (i > 0 && !(x_[i] > x_[i - 1])) throw ValidationError("interpolant: abscissae must be strictly increasing");
  }
  if (order_ == InterpOrder::linear || x_.size() < 3) {
    order_ = x_.size() < 3 ? InterpOrder::linear : order_;
    return;
  }
  // Tridiagonal solve for the natural spline second derivatives.
  const std::size_t n = x_.size();
  m_.assign(n, 0.0);
  std::vector<double> c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
    const double a = h0 / 6.0, b = (h0 + h1) / 3.0, cc = h1 / 6.0;
    const double r = (y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0;
    const double denom = b - a * c[i - 1];
    c[i] = cc / denom;
    d[i] = (r - a * d[i - 1]) / denom;
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m_[i] = d[i] - c[i] * m_[i + 1];
    if (i == 1) break;
  }
}

double Interpolant::operator()(double t) const {
  const std::size_t n = x_.size();
  std::size_t hi = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin());
  hi = std::clamp<std::size_t>(hi, 1, n - 1);
  const std::size_t lo = hi - 1;
  const double h = x_[hi] - x_[lo];
  const double a = (x_[hi] - t) / h, b = (t - x_[lo]) / h;
  double v = a * y_[lo] + b * y_[hi];
  if (order_ == InterpOrder::cubic) v += ((a * a * a - a) * m_[lo] + (b * b * b - b) * m_[hi]) * h * h / 6.0;
  return v;
}

}  // namespace cvmw
