#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cvmw/distribution.hpp"

namespace cvmw {

// Omega = [[0, I], [-I, 0]] for N modes, coordinates ordered (q_1..q_N, p_1..p_N).
Eigen::MatrixXd symplectic_form(int N);

// Lattice in R^{2N} with generator rows.  When `require_gkp` is set the
// constructor insists that all symplectic products of basis vectors lie in
// 2 pi Z (within 1e-9), which is what a GKP stabilizer lattice needs.
class SymplecticLattice {
 public:
  explicit SymplecticLattice(Eigen::MatrixXd generator, bool require_gkp = true, std::string name = {});

  int N() const { return static_cast<int>(M_.rows() / 2); }
  int dim() const { return static_cast<int>(M_.rows()); }
  const Eigen::MatrixXd& generator() const { return M_; }
  const std::string& name() const { return name_; }

  // max over entries of the distance of (M Omega M^T)/(2 pi) to the nearest integer.
  double symplectic_defect() const;
  bool is_gkp() const { return symplectic_defect() <= 1e-9; }

  SymplecticLattice scaled(double c) const;
  SymplecticLattice renamed(std::string name) const;

 private:
  Eigen::MatrixXd M_;
  std::string name_;
};

// Symplectic dual: generator 2 pi M^{-T} Omega, so that M Omega (M_dual)^T = 2 pi I.
// The dual of a GKP lattice need not satisfy the GKP condition itself, so the
// result is built without that check.
SymplecticLattice dual_lattice(const SymplecticLattice& L);

// K = |det M| / (2 pi)^N.
double code_size(const SymplecticLattice& L);

// Coordinates of v in the basis of L when v is a lattice vector (within tol).
bool contains(const SymplecticLattice& L, const Eigen::VectorXd& v, double tol = 1e-8);
// True when every basis vector of `sub` lies in `super`.
bool is_sublattice(const SymplecticLattice& sub, const SymplecticLattice& super, double tol = 1e-8);
// Same point set: the change of basis between the generators is an integer
// matrix whose Hermite normal form is the identity.
bool same_lattice(const SymplecticLattice& a, const SymplecticLattice& b, double tol = 1e-8);

// Row-style Hermite normal form of an integer matrix (zero rows dropped).
using IntMatrix = std::vector<std::vector<std::int64_t>>;
IntMatrix hermite_normal_form(IntMatrix rows);

// LLL-reduced basis (rows) of the lattice generated by the rows of M.
Eigen::MatrixXd lll_reduce(const Eigen::MatrixXd& M, double delta = 0.99);

struct SpectrumEntry {
  double length;
  std::int64_t multiplicity;
};

struct LengthSpectrum {
  std::vector<SpectrumEntry> entries;  // first entry is (0, 1)
  double r_max = 0.0;

  // Total number of lattice vectors with norm <= r_max.
  std::int64_t count() const;
};

// Every lattice vector of norm <= r_max, grouped by length (merge tolerance
// 1e-9 absolute).  Throws ValidationError when more than `budget` vectors
// would be visited.
LengthSpectrum length_spectrum(const SymplecticLattice& L, double r_max, std::int64_t budget = 10'000'000);

// Length of the shortest nonzero vector of L.
double shortest_vector_length(const SymplecticLattice& L);
// lambda_1 of the symplectic dual.
double gkp_distance(const SymplecticLattice& L);

// Ideal-code comb distributions: A = K^2 sum_L delta, B = K sum_{L dual} delta,
// both truncated at r_max.  The metadata records r_max.
std::pair<WeightDistribution, WeightDistribution> gkp_weights(const SymplecticLattice& L, double r_max);

// Relative mismatch between K sum_{dual} g_s and K^2 sum_{L} g^_s for the
// Gaussian g_s(r) = exp(-r^2 / (2 s^2)) and its transform s^{2N} exp(-s^2 r^2 / 2).
double poisson_macwilliams_residual(const SymplecticLattice& L, double s, double r_max);

// Named catalog: "square", "hexagonal", "selfdual:N", "scaled-z:N:c",
// "e8" (K = 2, see below), "e8-unit" (K = 1), "e8-16" (K = 16), "leech".
// The K = 2 E8 scaling is not symplectically integral and is constructed
// without the GKP check; is_gkp() reports false for it.
SymplecticLattice catalog_lattice(const std::string& name);
std::vector<std::string> catalog_names();

// Standard E8 generator (D8 together with D8 + 1/2, even coordinate sum).
Eigen::MatrixXd e8_generator();
// Leech lattice generator scaled to minimal norm 2 (minimal squared norm 4),
// built from the extended binary Golay code.
Eigen::MatrixXd leech_generator();
// Extended binary Golay code as 12 generator words of length 24.
std::vector<std::vector<int>> golay_generator();

// Text format: first line N, then 2N rows of 2N numbers.
SymplecticLattice read_lattice(std::istream& in, bool require_gkp = true);
void write_lattice(std::ostream& out, const SymplecticLattice& L);
// CSV `length,multiplicity`.
void write_spectrum_csv(std::ostream& out, const LengthSpectrum& s);

}  // namespace cvmw
