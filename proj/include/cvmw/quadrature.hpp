#pragma once

#include <functional>
#include <vector>

namespace cvmw {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Rules are computed once per order and shared; the returned reference stays valid.
const GaussRule& gauss_legendre(int n);

// Fixed-order Gauss-Legendre on [a, b].
double integrate_gl(const std::function<double(double)>& f, double a, double b, int n = 16);

// Composite Gauss-Legendre on [a, b] with `panels` equal panels.
double integrate_composite(const std::function<double(double)>& f, double a, double b, int panels, int n = 16);

struct MaximumResult {
  double x;
  double value;
  double bracket_width;
};

// Golden-section search for a local maximum of f inside [a, b].
MaximumResult golden_section_max(const std::function<double(double)>& f, double a, double b, double xtol = 1e-12);

}  // namespace cvmw
