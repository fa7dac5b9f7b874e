#pragma once

#include <vector>

namespace cvmw {

// Order of a Bessel function, restricted to integers and half-integers >= -1/2.
// Stored as twice the order so that equality and hashing are exact.
class BesselOrder {
 public:
  explicit BesselOrder(double nu);
  static BesselOrder from_twice(int twice_nu);

  double value() const noexcept { return 0.5 * twice_; }
  int twice() const noexcept { return twice_; }
  bool is_half_integer() const noexcept { return (twice_ & 1) != 0; }

  friend bool operator==(BesselOrder a, BesselOrder b) noexcept { return a.twice_ == b.twice_; }

 private:
  BesselOrder() = default;
  int twice_ = 0;
};

// Bessel function of the first kind J_nu(x) for x >= 0.
double bessel_j(BesselOrder nu, double x);
double bessel_j(double nu, double x);

// k-th positive zero of J_nu (k >= 1).  Zeros are memoized per order.
double bessel_zero(BesselOrder nu, int k);
double bessel_zero(double nu, int k);

// Modified Bessel function I_0.  Throws for x > 700 where the result overflows.
double bessel_i0(double x);
// exp(-x) I_0(x); finite for every x >= 0.
double bessel_i0_scaled(double x);

// Laguerre polynomial L_n(x) by the three-term recurrence.
double laguerre(int n, double x);

double gamma_fn(double x);
double beta_fn(double a, double b);
// Gamma(n + 1), also for half-integer n.
double factorial(double n);

// Surface area of the k-sphere of radius r embedded in R^{k+1}.
double sphere_area(int k, double r);

// Zonal spherical function phi_N(x) = J_{N-1}(x) / x^{N-1}, with the
// removable singularity at the origin filled in.  N is a half-integer >= 1/2.
double zonal(double N, double x);

// Value of phi_N at the origin, 1 / (2^{N-1} Gamma(N)).
double zonal_at_origin(double N);

}  // namespace cvmw
