#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cvmw/lattice.hpp"
#include "cvmw/weights.hpp"

namespace cvmw {

using Complex = std::complex<double>;

// Operator on the span of the first `cutoff` number states.  Immutable.
class FockOperator {
 public:
  // When `hermitian` is set the matrix is checked against its adjoint
  // (relative tolerance 1e-12) and ValidationError is thrown on failure.
  explicit FockOperator(Eigen::MatrixXcd m, bool hermitian = false);

  int cutoff() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return m_; }
  Complex operator()(int row, int col) const { return m_(row, col); }
  bool is_hermitian() const { return hermitian_; }
  Complex trace() const { return m_.trace(); }
  FockOperator adjoint() const;

 private:
  Eigen::MatrixXcd m_;
  bool hermitian_ = false;
};

FockOperator operator*(const FockOperator& a, const FockOperator& b);

struct EnvelopeParams {
  double delta;
  explicit EnvelopeParams(double delta);
  double T() const;  // tanh(delta^2 / 2)
};

// Number-basis matrix of D(xi) for xi = (q, p), i.e. the standard displacement
// with amplitude alpha = (q + i p) / sqrt 2.  Throws TruncationError when the
// cutoff does not exceed 4 |xi|^2 and ValidationError when |xi|^2 > 2000.
FockOperator displacement_matrix(std::span<const double> xi, int cutoff);

// Size b of the leading block on which the truncated D(xi) is unitary to 1e-8,
// b = cutoff - ceil(4 |xi|^2 + 2.5 |xi| sqrt(cutoff) + 10), clamped at 0.  The
// margin grows with sqrt(cutoff) because D(xi) spreads |n> over a band of
// width about |xi| sqrt(2 n).
int unitary_block_size(std::span<const double> xi, int cutoff);

// diag(exp(-delta^2 n)).
FockOperator envelope_matrix(const EnvelopeParams& params, int cutoff);

// tr(D(xi)^dagger E D(sigma) E) in closed form:
// exp{-(|xi - sigma|^2 / T + T |xi + sigma|^2) / 8} / (1 - exp(-2 delta^2)).
Complex enveloped_char_analytic(std::span<const double> sigma, const EnvelopeParams& params,
                                std::span<const double> xi);

// Fock-space trace of the same quantity, checked against the closed form
// (ConsistencyError beyond 1e-6 relative).  Returns the Fock value.
Complex enveloped_char(std::span<const double> sigma, const EnvelopeParams& params, std::span<const double> xi,
                       int cutoff);

// Orthonormal basis of the image of E Pi E for a single-mode qubit GKP code.
struct ApproxCodespace {
  std::vector<Eigen::VectorXcd> states;  // logical 0 and 1 after Gram-Schmidt
  int cutoff = 0;
  double delta = 0.0;
  double radius = 0.0;        // lattice-sum truncation radius
  double raw_overlap = 0.0;   // |<v0|v1>| / (|v0| |v1|) before Gram-Schmidt
  double norm_drift = 0.0;    // squared change of the states under a 25% larger cutoff
  double lambda1_dual = 0.0;  // shortest logical displacement
  Eigen::Vector2d sigma1, sigma2;  // reduced basis of the dual lattice
};

// cutoff = 0 selects ceil(12 / delta^2); radius = 0 selects
// 6 max(1 / sqrt(T), lambda1_dual).  Requires delta >= 0.08 and K = 2.
ApproxCodespace approx_gkp_codespace(const SymplecticLattice& L, const EnvelopeParams& params, int cutoff = 0,
                                     double radius = 0.0, bool check_convergence = true);

// Pi / K for the codespace.
FockOperator maximally_mixed_state(const ApproxCodespace& cs);

// How the integral over each circle |xi| = r is carried out.
struct AngularQuadrature {
  enum class Method {
    trapezoid,  // `nodes` equispaced angles; re-run with twice as many
    fourier     // exact, via the angular Fourier coefficients
  };
  Method method = Method::trapezoid;
  int nodes = 32;
};

// A(r) and B(r) of the codespace on `r_grid`, as sampled distributions with a
// gaussian decay hint.  A trapezoid run whose doubled-node result differs by
// more than 1e-6 (relative to the largest B) throws AccuracyError.
WeightPair approx_weights(const ApproxCodespace& cs, std::span<const double> r_grid, AngularQuadrature quad = {});

// 1 - A(r) / (K B(r)) at a single radius, from a cancellation-free
// numerator, together with the radius and B(r).
struct EpsilonPoint {
  double r = 0.0;
  double eps = 0.0;
  double B = 0.0;
};
EpsilonPoint approx_epsilon_at(const ApproxCodespace& cs, double r, AngularQuadrature quad = {});

struct ApproxEpsilon {
  double eps = 0.0;
  double argmax = 0.0;
  double d = 0.0;
  double delta = 0.0;
  int cutoff = 0;
  std::vector<double> r, curve;  // scanned profile
};

// Epsilon of the finite-energy code at distance d = lambda1_dual / 2 - margin.
ApproxEpsilon approx_qedc_epsilon(const SymplecticLattice& L, const EnvelopeParams& params, double delta_margin,
                                  int grid_points = 64);
ApproxEpsilon approx_qedc_epsilon(const ApproxCodespace& cs, double delta_margin, int grid_points = 64);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double reference = 0.0;  // -lambda1_dual * margin / 8
  double relative_deviation = 0.0;
  std::vector<double> deltas, eps;
};

// Least-squares fit of log eps against 1 / delta^2.
SlopeFit fit_epsilon_slope(const SymplecticLattice& L, double delta_margin, std::span<const double> deltas);

struct FidelityResult {
  double entanglement_fidelity = 0.0;  // mean over the circle of |tr(rho D)|^2
  double stay_probability = 0.0;       // mean of tr(rho D rho D^dagger)
};

// The channel averaging D(xi) rho D(xi)^dagger over |xi| = r, evaluated with
// `nodes` equispaced angles.
FidelityResult fidelity_identities(const FockOperator& rho, double r, int nodes = 64);

struct SecondMomentChain {
  double min_occupation_scan = 0.0;   // min over a grid of the fundamental cell
  double min_occupation_exact = 0.0;  // nbar - |<a>|^2
  double b_moment = 0.0;              // (1 / 4 pi) int B r^2 dr
  double nbar = 0.0;
  double upper = 0.0;                 // 4 nbar + 3
};

// Occupation bounds for the maximally mixed logical state.  B is integrated
// on [0, r_max] (default 7 / delta) with exact angular integration.
SecondMomentChain second_moment_chain(const SymplecticLattice& L, const ApproxCodespace& cs, double r_max = 0.0,
                                      int scan_points = 24);

}  // namespace cvmw
