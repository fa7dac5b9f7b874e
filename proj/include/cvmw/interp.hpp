#pragma once

#include <span>
#include <vector>

namespace cvmw {

enum class InterpOrder { linear, cubic };

// Piecewise interpolant through (x_i, y_i) with strictly increasing x.
// Cubic uses a natural spline.  Outside [x_0, x_n] the end pieces are extended.
class Interpolant {
 public:
  Interpolant() = default;
  Interpolant(std::span<const double> x, std::span<const double> y, InterpOrder order = InterpOrder::cubic);

  double operator()(double t) const;

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  std::span<const double> x() const { return x_; }
  std::span<const double> y() const { return y_; }
  InterpOrder order() const { return order_; }

 private:
  std::vector<double> x_, y_, m_;  // m_: second derivatives for the cubic case
  InterpOrder order_ = InterpOrder::cubic;
};

}  // namespace cvmw
