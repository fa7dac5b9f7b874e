#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cvmw/hankel.hpp"
#include "cvmw/interp.hpp"

namespace cvmw {

// The Levenshtein auxiliary pair on R^{2N}:
//   f(x) = (1 - x^2) ghat(x)^2,  ghat(x) = N! 2^N J_N(j x) / ((1 - x^2) (j x)^N),
//   g(x) = c (1 - phi_N(x) / phi_N(j)) on |x| < j,
// with j the first positive zero of J_N and c = 2^N N! / j^{2N}.
class LevenshteinFunction {
 public:
  explicit LevenshteinFunction(double N);

  double N() const { return N_; }
  double jN() const { return j_; }
  double cN() const { return c_; }

  double f(double x) const;
  // f through the Bessel product over the first 64 zeros with a tail factor
  // from the Rayleigh sums; accurate for x in [0, 2].
  double f_product(double x) const;
  double ghat(double x) const;
  double g(double x) const;

  // Transform by Hankel quadrature of f (decay power 2N + 3).
  IntegralResult fhat_hankel(double y, const QuadratureConfig& cfg = {}) const;
  // Transform by integrating g over the intersection of two balls of radius j.
  double fhat_convolution(double y) const;
  // Both routes; throws ConsistencyError when they differ by more than
  // 1e-5 c.  Returns the Hankel value, computed with the tail tolerance
  // capped at 1e-12 c.
  double fhat(double y, const QuadratureConfig& cfg = {}) const;

 private:
  double N_, j_, c_;
  double phi_j_;                 // phi_N(j)
  std::vector<double> zeros_;    // j_{N,k}, k = 1..64
  double tail1_, tail2_, tail3_; // Rayleigh sums beyond the stored zeros
};

double lev_f(double N, double x);
double lev_g(double N, double x);
double lev_fhat(double N, double y, const QuadratureConfig& cfg = {});

// Tabulated auxiliary pair (x, f, fhat) on ascending abscissae.
class AuxFunctionTable {
 public:
  AuxFunctionTable(std::vector<double> x, std::vector<double> f, std::vector<double> fhat, std::string source = {},
                   InterpOrder order = InterpOrder::cubic);

  double f(double x) const;
  double fhat(double x) const;
  double x_max() const { return x_.back(); }
  std::span<const double> x() const { return x_; }
  std::span<const double> f_samples() const { return f_; }
  std::span<const double> fhat_samples() const { return fhat_; }
  const std::string& source() const { return source_; }
  // First abscissa at which the f samples become non-positive (infinity if never).
  double sign_change() const;

  // Throws InvalidAuxiliaryError naming the first sample that breaks
  // fhat >= 0, f >= 0 below d or f <= 0 from d on (tolerance 1e-12).
  void check_signs(double d) const;

  // Conservative interpolation error estimate for f and fhat on [0, x_hi]:
  // half-resolution spline vs the samples, relative to the largest |value|.
  double interpolation_error(double x_hi) const;

 private:
  std::vector<double> x_, f_, fhat_;
  std::string source_;
  Interpolant fi_, fhi_;
};

// CSV `x,f,fhat`; '#' lines ignored.
AuxFunctionTable read_aux_table(std::istream& in, std::string source = {}, InterpOrder order = InterpOrder::cubic);
void write_aux_table(std::ostream& out, const AuxFunctionTable& t);

// Samples the Levenshtein pair scaled to distance d, f(x / d) and
// d^{2N} fhat(d x), on n points of [0, x_max].  Uses the convolution route.
AuxFunctionTable levenshtein_table(double N, double d, double x_max, int n = 2049);

struct BoundResult {
  double K_max = 0.0;
  double sup = 0.0;           // sup of the quotient over [0, d]
  double attained_at = 0.0;
  double bracket_width = 0.0; // final golden-section bracket
  std::size_t excluded = 0;   // grid points with negligible fhat
  std::vector<double> excluded_points;
};

// K <= sup_{[0, d]} f / fhat / (1 - eps) on a 4096-point grid (or `grid`)
// with golden-section refinement.  The table's sign conditions are checked
// first.
BoundResult cohn_elkies_bound(const AuxFunctionTable& table, double N, double d, double eps,
                              std::span<const double> grid = {});

// Same evaluator on an unscaled pair given as callables; the pair is scaled to
// distance d internally, i.e. the quotient is f(x / d) / (d^{2N} fhat(d x)).
BoundResult cohn_elkies_bound_scaled(const std::function<double(double)>& f, const std::function<double(double)>& fhat,
                                     double N, double d, double eps, std::span<const double> grid = {});

// K_max = j^{2N} / ((1 - eps) N! 2^N d^{2N}); throws ValidityError carrying
// d_plus(N) when d exceeds it.
double levenshtein_bound(double N, double d, double eps);

// Distance at which the Levenshtein bound equals K (ignoring d_plus).
double levenshtein_distance_for(double N, double K);

// Threshold below which the Levenshtein quotient peaks at the origin.
// N = 1/2 uses its own closed form, (12 pi)^{1/6}.
double d_plus(double N);

struct SupremumCheck {
  bool at_origin = false;
  bool within_guarantee = false;  // d <= d_plus(N)
  double sup = 0.0;
  double attained_at = 0.0;
  double origin_value = 0.0;
  std::size_t excluded = 0;
};

// Scans f(x / d) / fhat(x d) over `grid` (default 4096 points of [0, d]).
// at_origin holds when no grid value exceeds the x = 0 value by more than
// 1e-9 relative.  Larger d than d_plus is allowed and reported as exploratory.
SupremumCheck lemma2_supremum_check(double N, double d, std::span<const double> grid = {});

// 9 / (2 j^{N+1} |J_{N-1}(j)|).
double quad_bound_constant(double N);

enum class MagicFamily { e8, leech };

struct MagicQuotient {
  double sup = 0.0;
  double attained_at = 0.0;
  double reference = 0.0;        // (2 pi)^4 or (2 pi)^12
  double relative_excess = 0.0;  // sup / reference - 1
  double interpolation_error = 0.0;
  std::vector<double> x, quotient;  // the scanned curve
};

// sup over x in [0, 1] of f(s x) / fhat(d^2 x / s), with s = sqrt 2 (E8) or 2
// (Leech).  Throws CoverageError when the table is too short or too coarse.
MagicQuotient magic_quotient_check(const AuxFunctionTable& table, MagicFamily family, double d, int grid_points = 4096);

}  // namespace cvmw
