#pragma once

#include <complex>
#include <functional>
#include <span>

#include "cvmw/distribution.hpp"
#include "cvmw/radial.hpp"

namespace cvmw {

// Knobs for the oscillatory Bessel quadrature.
struct QuadratureConfig {
  double truncation = 0.0;       // 0 selects the radius from the decay hint
  int panels_per_half_period = 4;
  int nodes_per_panel = 16;
  double tail_tolerance = 1e-9;  // absolute
  double max_panel_width = 0.25;
  double max_truncation = 1e5;   // give up (AccuracyError) beyond this radius

  void validate() const;
};

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  double truncation = 0.0;
};

// Integral of phi_N(y r) w(r) over r in [0, inf).  The decay hint describes w.
// Panels are aligned with the zeros of J_{N-1}(y r).
IntegralResult zonal_integral(const std::function<double(double)>& w, double N, double y, const DecayHint& hint,
                              const QuadratureConfig& cfg = {});

// Radial part of the unitary Fourier transform on R^{2N}:
//   f^(y) = y^{1-N} int_0^inf J_{N-1}(y r) r^N f(r) dr,
// evaluated as int phi_N(y r) r^{2N-1} f(r) dr so y = 0 needs no special case.
double radial_fourier(const RadialFunction& f, double N, double y, const QuadratureConfig& cfg = {});
IntegralResult radial_fourier_detailed(const RadialFunction& f, double N, double y, const QuadratureConfig& cfg = {});

// Bessel-kernel transform of a weight distribution,
//   B(r) = r^N int_0^inf J_{N-1}(r x) x^{1-N} A(x) dx,
// sampled on r_grid.  Point masses contribute exact kernel evaluations.
WeightDistribution macwilliams_transform(const WeightDistribution& A, std::span<const double> r_grid,
                                         const QuadratureConfig& cfg = {});

// Same transform returned as a lazily evaluated radial function, so that it
// can be fed back into the quadrature (double transforms, smoothing checks).
RadialFunction macwilliams_function(const WeightDistribution& A, const QuadratureConfig& cfg = {});

// max_r |T(T(A))(r) - A(r)| / max_r |A(r)| over r_grid, where T is the
// transform above.  Zero input gives zero.
double involution_residual(const WeightDistribution& A, std::span<const double> r_grid,
                           const QuadratureConfig& cfg = {});

// (|eta|^{N-1} / (2 pi r)^N) * integral over the sphere |xi| = r in R^{2N} of
// exp(-i xi^T Omega eta), by deterministic angular quadrature.  N is 1 or 2.
std::complex<double> zonal_surface_integral(int N, double r, std::span<const double> eta, int nodes = 0);

}  // namespace cvmw
