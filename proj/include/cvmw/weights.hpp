#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cvmw/distribution.hpp"
#include "cvmw/hankel.hpp"

namespace cvmw {

// Parameters of an [[N, K, d, eps]] error-detecting code.
struct CodeParams {
  int N = 1;
  double K = 1.0;
  double d = 1.0;
  double eps = 0.0;

  void validate() const;
};

struct WeightPair {
  WeightDistribution A;
  WeightDistribution B;
};

// A built-in code family.  Parsed from strings such as "coherent", "fock:3",
// "cat:4" and "gkp:square" (any catalog lattice name after "gkp:").
struct ModelSpec {
  enum class Kind { coherent, fock, cat, gkp };
  Kind kind = Kind::coherent;
  int fock_n = 0;
  double alpha = 0.0;
  std::string lattice;
  double r_max = 8.0;  // comb truncation for gkp

  static ModelSpec parse(const std::string& text, double r_max = 8.0);
  std::string label() const;
  // Code dimension of the model.
  double code_dimension() const;
};

WeightPair analytic_weights(const ModelSpec& model);

struct NormalizationResult {
  double intA = 0.0;
  double intB = 0.0;
};

// Integrals of A and B over [0, inf): quadrature for the continuous parts
// plus the exact comb masses.  Combs must carry an "r_max" metadata entry
// (they are truncations of infinite sums).
NormalizationResult normalization_integrals(const WeightPair& W);
double total_integral(const WeightDistribution& W, const QuadratureConfig& cfg = {});

struct EpsilonResult {
  double eps = 0.0;
  double argmax = 0.0;
  std::size_t skipped = 0;  // grid points with negligible B
  std::size_t used = 0;
};

// max over r in [0, d) of 1 - A(r) / (K B(r)), clamped to [0, 1].  Continuous
// parts are scanned on `grid` (default: 2048 uniform points) and refined by
// golden section around the running maximum.  Pure combs are compared mass
// by mass at the support points of B below d.  Points where B is at most
// 1e-14 max B are skipped.
EpsilonResult qedc_epsilon(const WeightDistribution& A, const WeightDistribution& B, double K, double d,
                           std::span<const double> grid = {});

// (1 / 4 pi) int_0^inf B(r) r^2 dr.
double b_second_moment(const WeightDistribution& B);

// True iff A(r) <= K B(r) (1 + 1e-9) at every grid point.  For combs the
// masses at coincident support points are compared.
bool ordering_check(const WeightDistribution& A, const WeightDistribution& B, double K, std::span<const double> grid);

// CSV with a `r,A,B` block and, for combs, a `#deltas` block of
// `location,massA,massB`.  `meta` lines are written as a leading comment block.
void write_weights_csv(std::ostream& out, const WeightPair& W, std::span<const double> r_grid,
                       const std::vector<std::string>& meta = {});

// Reads a sampled distribution from CSV with header `r,value` or `r,A,B`
// (the A column is used).  Lines starting with '#' are ignored.  Without a
// hint the samples are treated as compactly supported on [0, last r].
WeightDistribution read_distribution_csv(std::istream& in, double N, std::optional<DecayHint> hint = std::nullopt);

}  // namespace cvmw
