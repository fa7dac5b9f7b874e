#include "cvmw/gkp_approx.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cvmw/errors.hpp"
#include "cvmw/parallel.hpp"
#include "cvmw/quadrature.hpp"

namespace cvmw {

namespace {

constexpr double kPi = std::numbers::pi;
// |xi|^2 above which exp(-|xi|^2 / 4) underflows in the recurrence start.
constexpr double kMaxSquaredDisplacement = 2000.0;

// Visits the number-basis entries <n + k| D |n> of the displacement with real
// amplitude sqrt(x), for n + k < cutoff.  The mirrored entry <n| D |n + k>
// equals (-1)^k times the same value.  The values follow from the normalized
// associated Laguerre recurrence and never exceed 1 in magnitude.
template <class Fn>
void for_each_displacement_entry(double x, int cutoff, Fn&& fn) {
  if (x == 0.0) {
    for (int n = 0; n < cutoff; ++n) fn(0, n, 1.0);
    return;
  }
  const double lx = std::log(x);
  for (int k = 0; k < cutoff; ++k) {
    const int len = cutoff - k;
    double prev = 0.0;
    double cur = std::exp(0.5 * k * lx - 0.5 * std::lgamma(k + 1.0) - 0.5 * x);
    for (int n = 0; n < len; ++n) {
      fn(k, n, cur);
      const double next =
          ((2.0 * n + 1.0 + k - x) * cur - std::sqrt(static_cast<double>(n) * (n + k)) * prev) /
          std::sqrt((n + 1.0) * (n + k + 1.0));
      prev = cur;
      cur = next;
    }
  }
}

void check_xi(std::span<const double> xi) {
  if (xi.size() != 2) throw ValidationError("single-mode displacement needs a 2-vector (q, p)");
  if (!std::isfinite(xi[0]) || !std::isfinite(xi[1])) throw ValidationError("displacement must be finite");
  if (xi[0] * xi[0] + xi[1] * xi[1] > kMaxSquaredDisplacement) {
    throw ValidationError("displacement too large for the number-basis recurrence (|xi|^2 > 2000)");
  }
}

// D(xi) restricted to the first `cutoff` number states, with no check of how
// well the block approximates a unitary.  Bilinear forms between vectors
// supported below the cutoff are exact.
Eigen::MatrixXcd displacement_block(double q, double p, int cutoff) {
  const double x = 0.5 * (q * q + p * p);
  const double theta = std::atan2(p, q);
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(cutoff, cutoff);
  std::vector<Complex> up(cutoff), down(cutoff);
  for (int k = 0; k < cutoff; ++k) {
    up[k] = std::polar(1.0, k * theta);
    down[k] = (k % 2 == 0 ? 1.0 : -1.0) * std::conj(up[k]);
  }
  for_each_displacement_entry(x, cutoff, [&](int k, int n, double v) {
    D(n + k, n) = v * up[k];
    if (k > 0) D(n, n + k) = v * down[k];
  });
  return D;
}

// Angular Fourier coefficients c_k(r) of <u|D(r e^{i theta})|v> (indexed
// k + cutoff - 1), so that the matrix element is sum_k c_k e^{i k theta}.
using Coeffs = std::vector<Complex>;

struct PairCoeffs {
  Coeffs c00, c11, c01, c10;
};

PairCoeffs angular_coefficients(const ApproxCodespace& cs, double r) {
  const int M = cs.cutoff;
  const auto& u0 = cs.states[0];
  const auto& u1 = cs.states[1];
  PairCoeffs pc;
  for (Coeffs* c : {&pc.c00, &pc.c11, &pc.c01, &pc.c10}) c->assign(2 * M - 1, Complex{});
  const int off = M - 1;
  for_each_displacement_entry(0.5 * r * r, M, [&](int k, int n, double v) {
    const int hi = n + k;
    const Complex a0 = std::conj(u0[hi]) * v, a1 = std::conj(u1[hi]) * v;
    pc.c00[off + k] += a0 * u0[n];
    pc.c11[off + k] += a1 * u1[n];
    pc.c01[off + k] += a0 * u1[n];
    pc.c10[off + k] += a1 * u0[n];
    if (k > 0) {
      const double w = (k % 2 == 0) ? v : -v;
      const Complex b0 = std::conj(u0[n]) * w, b1 = std::conj(u1[n]) * w;
      pc.c00[off - k] += b0 * u0[hi];
      pc.c11[off - k] += b1 * u1[hi];
      pc.c01[off - k] += b0 * u1[hi];
      pc.c10[off - k] += b1 * u0[hi];
    }
  });
  return pc;
}

// Circle integrals at radius r (surface measure r dtheta):
//   A = int |chi00 + chi11|^2, B = int sum |chi_ij|^2,
//   num = int |chi00 - chi11|^2 + 2 |chi01|^2 + 2 |chi10|^2 = 2 B - A.
struct CircleIntegrals {
  double A = 0.0, B = 0.0, num = 0.0;
};

CircleIntegrals fourier_integrals(const PairCoeffs& pc, double r) {
  CircleIntegrals out;
  for (std::size_t k = 0; k < pc.c00.size(); ++k) {
    const double o01 = std::norm(pc.c01[k]), o10 = std::norm(pc.c10[k]);
    out.A += std::norm(pc.c00[k] + pc.c11[k]);
    out.B += std::norm(pc.c00[k]) + std::norm(pc.c11[k]) + o01 + o10;
    out.num += std::norm(pc.c00[k] - pc.c11[k]) + 2.0 * (o01 + o10);
  }
  const double s = 2.0 * kPi * r;
  out.A *= s;
  out.B *= s;
  out.num *= s;
  return out;
}

CircleIntegrals trapezoid_integrals(const PairCoeffs& pc, double r, int nodes) {
  const int len = static_cast<int>(pc.c00.size());
  const int off = (len - 1) / 2;
  CircleIntegrals out;
  for (int l = 0; l < nodes; ++l) {
    const double theta = 2.0 * kPi * l / nodes;
    Complex x00{}, x11{}, x01{}, x10{};
    // e^{i k theta} for k = -off .. off by stepping a unit phasor.
    const Complex step = std::polar(1.0, theta);
    Complex ph = std::polar(1.0, -off * theta);
    for (int i = 0; i < len; ++i) {
      x00 += pc.c00[i] * ph;
      x11 += pc.c11[i] * ph;
      x01 += pc.c01[i] * ph;
      x10 += pc.c10[i] * ph;
      ph *= step;
    }
    const double o01 = std::norm(x01), o10 = std::norm(x10);
    out.A += std::norm(x00 + x11);
    out.B += std::norm(x00) + std::norm(x11) + o01 + o10;
    out.num += std::norm(x00 - x11) + 2.0 * (o01 + o10);
  }
  const double s = 2.0 * kPi * r / nodes;
  out.A *= s;
  out.B *= s;
  out.num *= s;
  return out;
}

CircleIntegrals circle_integrals(const ApproxCodespace& cs, double r, const AngularQuadrature& quad, double scale) {
  if (!(r >= 0.0) || 0.5 * r * r > 0.5 * kMaxSquaredDisplacement) {
    throw ValidationError("radius must lie in [0, sqrt(2000)]");
  }
  const PairCoeffs pc = angular_coefficients(cs, r);
  if (quad.method == AngularQuadrature::Method::fourier) return fourier_integrals(pc, r);
  if (quad.nodes < 4) throw ValidationError("angular quadrature needs at least 4 nodes");
  const CircleIntegrals coarse = trapezoid_integrals(pc, r, quad.nodes);
  const CircleIntegrals fine = trapezoid_integrals(pc, r, 2 * quad.nodes);
  const double ref = std::max({scale, fine.B, 1e-300});
  const double change = std::max(std::abs(fine.A - coarse.A), std::abs(fine.B - coarse.B)) / ref;
  if (change > 1e-6) {
    std::ostringstream msg;
    msg << "angular quadrature under-resolved at r = " << r << " with " << quad.nodes
        << " nodes (relative change " << change << " on doubling)";
    throw AccuracyError(msg.str(), fine.B, change);
  }
  return fine;
}

// Lagrange-Gauss reduction of a 2D basis; returns the shortest vector first.
std::pair<Eigen::Vector2d, Eigen::Vector2d> gauss_reduce(Eigen::Vector2d a, Eigen::Vector2d b) {
  if (b.squaredNorm() < a.squaredNorm()) std::swap(a, b);
  for (int iter = 0; iter < 1000; ++iter) {
    const double mu = std::round(a.dot(b) / a.squaredNorm());
    b -= mu * a;
    if (b.squaredNorm() >= a.squaredNorm()) break;
    std::swap(a, b);
  }
  return {a, b};
}

struct DualBasis {
  Eigen::Vector2d s1, s2;
  double lambda1;
};

DualBasis qubit_dual_basis(const SymplecticLattice& L) {
  if (L.N() != 1) throw ValidationError("finite-energy GKP codes are single-mode");
  if (std::abs(code_size(L) - 2.0) > 1e-9) throw ValidationError("finite-energy GKP codes need K = 2");
  if (!L.is_gkp()) throw ValidationError("lattice is not symplectically integral");
  const Eigen::MatrixXd G = dual_lattice(L).generator();
  auto [s1, s2] = gauss_reduce(G.row(0).transpose(), G.row(1).transpose());
  double omega = s1(0) * s2(1) - s1(1) * s2(0);  // s1^T Omega s2
  if (std::abs(std::abs(omega) - kPi) > 1e-9 * kPi) {
    throw ValidationError("dual basis of a K = 2 lattice must have symplectic product pi");
  }
  if (omega < 0) s2 = -s2;
  return {s1, s2, s1.norm()};
}

// Coherent-state superposition E sum_{a, b} sign(a, b) |alpha_{a,b}> over the
// vectors a s1 + 2 b s2 of norm at most R, with the number-state amplitudes
// evaluated in log space so that large |alpha| do not underflow early.
Eigen::VectorXcd enveloped_codeword(const DualBasis& db, int logical, double delta, double R, int M) {
  Eigen::Matrix2d G;
  G.row(0) = db.s1.transpose();
  G.row(1) = 2.0 * db.s2.transpose();
  const Eigen::Matrix2d Ginv = G.inverse();
  const int amax = static_cast<int>(std::ceil(R * Ginv.col(0).norm())) + 1;
  const int bmax = static_cast<int>(std::ceil(R * Ginv.col(1).norm())) + 1;
  std::vector<double> half_lgamma(M);
  for (int n = 0; n < M; ++n) half_lgamma[n] = 0.5 * std::lgamma(n + 1.0);
  const double d2 = delta * delta;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(M);
  for (int a = -amax; a <= amax; ++a) {
    for (int b = -bmax; b <= bmax; ++b) {
      const Eigen::Vector2d s = a * db.s1 + 2.0 * b * db.s2;
      if (s.norm() > R) continue;
      const long long e = logical == 0 ? static_cast<long long>(a) * b : static_cast<long long>(a) * (b + 1);
      const double sign = (e % 2 == 0) ? 1.0 : -1.0;
      const double abs2 = 0.5 * s.squaredNorm();
      if (abs2 == 0.0) {
        v[0] += sign;
        continue;
      }
      const double la = 0.5 * std::log(abs2);
      const double phi = std::atan2(s(1), s(0));
      for (int n = 0; n < M; ++n) {
        const double lm = -0.5 * abs2 + n * (la - d2) - half_lgamma[n];
        if (lm < -745.0) continue;
        v[n] += sign * std::polar(std::exp(lm), n * phi);
      }
    }
  }
  return v;
}

ApproxCodespace build_codespace(const DualBasis& db, const EnvelopeParams& params, int M, double R) {
  ApproxCodespace cs;
  cs.cutoff = M;
  cs.delta = params.delta;
  cs.radius = R;
  cs.lambda1_dual = db.lambda1;
  cs.sigma1 = db.s1;
  cs.sigma2 = db.s2;
  const Eigen::VectorXcd v0 = enveloped_codeword(db, 0, params.delta, R, M);
  const Eigen::VectorXcd v1 = enveloped_codeword(db, 1, params.delta, R, M);
  const double n0 = v0.norm(), n1 = v1.norm();
  if (!(n0 > 0.0) || !(n1 > 0.0) || !std::isfinite(n0) || !std::isfinite(n1)) {
    throw NumericalError("enveloped codewords vanished or overflowed");
  }
  cs.raw_overlap = std::abs(v0.dot(v1)) / (n0 * n1);
  Eigen::VectorXcd u0 = v0 / n0;
  Eigen::VectorXcd u1 = v1;
  for (int pass = 0; pass < 2; ++pass) u1 -= u0.dot(u1) * u0;  // dot conjugates the left side
  const double nu1 = u1.norm();
  if (!(nu1 > 1e-12 * n1)) throw NumericalError("Gram-Schmidt: codewords are linearly dependent");
  u1 /= nu1;
  cs.states = {std::move(u0), std::move(u1)};
  return cs;
}

}  // namespace

FockOperator::FockOperator(Eigen::MatrixXcd m, bool hermitian) : m_(std::move(m)), hermitian_(hermitian) {
  if (m_.rows() != m_.cols() || m_.rows() < 1) throw ValidationError("Fock operator must be a non-empty square matrix");
  if (!m_.allFinite()) throw ValidationError("Fock operator has non-finite entries");
  if (hermitian_) {
    const double defect = (m_ - m_.adjoint()).norm();
    if (defect > 1e-12 * std::max(1.0, m_.norm())) throw ValidationError("Fock operator claimed hermitian is not");
  }
}

FockOperator FockOperator::adjoint() const { return FockOperator(m_.adjoint(), hermitian_); }

FockOperator operator*(const FockOperator& a, const FockOperator& b) {
  if (a.cutoff() != b.cutoff()) throw ValidationError("Fock operators with different cutoffs");
  return FockOperator(a.matrix() * b.matrix());
}

EnvelopeParams::EnvelopeParams(double d) : delta(d) {
  if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("envelope width delta must be positive");
}

double EnvelopeParams::T() const { return std::tanh(0.5 * delta * delta); }

FockOperator displacement_matrix(std::span<const double> xi, int cutoff) {
  check_xi(xi);
  if (cutoff < 1) throw ValidationError("cutoff must be positive");
  const double s = xi[0] * xi[0] + xi[1] * xi[1];
  if (cutoff <= static_cast<int>(std::ceil(4.0 * s))) {
    std::ostringstream msg;
    msg << "cutoff " << cutoff << " too small for |xi|^2 = " << s << " (needs more than 4 |xi|^2)";
    throw TruncationError(msg.str());
  }
  return FockOperator(displacement_block(xi[0], xi[1], cutoff));
}

int unitary_block_size(std::span<const double> xi, int cutoff) {
  check_xi(xi);
  const double s = xi[0] * xi[0] + xi[1] * xi[1];
  const int margin = static_cast<int>(std::ceil(4.0 * s + 2.5 * std::sqrt(s * cutoff) + 10.0));
  return std::max(cutoff - margin, 0);
}

FockOperator envelope_matrix(const EnvelopeParams& params, int cutoff) {
  if (cutoff < 1) throw ValidationError("cutoff must be positive");
  Eigen::VectorXcd diag(cutoff);
  for (int n = 0; n < cutoff; ++n) diag[n] = std::exp(-params.delta * params.delta * n);
  return FockOperator(diag.asDiagonal().toDenseMatrix(), true);
}

Complex enveloped_char_analytic(std::span<const double> sigma, const EnvelopeParams& params,
                                std::span<const double> xi) {
  check_xi(sigma);
  check_xi(xi);
  const double T = params.T();
  const double dq = xi[0] - sigma[0], dp = xi[1] - sigma[1];
  const double sq = xi[0] + sigma[0], sp = xi[1] + sigma[1];
  const double expo = -((dq * dq + dp * dp) / T + T * (sq * sq + sp * sp)) / 8.0;
  // Fixed by xi = sigma = 0, where the trace is sum_n exp(-2 delta^2 n).
  const double norm = 1.0 / -std::expm1(-2.0 * params.delta * params.delta);
  return {norm * std::exp(expo), 0.0};
}

Complex enveloped_char(std::span<const double> sigma, const EnvelopeParams& params, std::span<const double> xi,
                       int cutoff) {
  const FockOperator Dx = displacement_matrix(xi, cutoff);
  const FockOperator Ds = displacement_matrix(sigma, cutoff);
  const FockOperator E = envelope_matrix(params, cutoff);
  const Eigen::VectorXcd e = E.matrix().diagonal();
  // tr(Dx^dagger E Ds E) = sum_{m,n} conj(Dx(n, m)) e_n Ds(n, m) e_m.
  Complex fock{};
  for (int m = 0; m < cutoff; ++m)
    for (int n = 0; n < cutoff; ++n) fock += std::conj(Dx(n, m)) * e[n] * Ds(n, m) * e[m];
  const Complex analytic = enveloped_char_analytic(sigma, params, xi);
  const double scale = std::max(std::abs(analytic), 1e-300);
  if (std::abs(fock - analytic) > 1e-6 * scale) {
    std::ostringstream msg;
    msg << "enveloped characteristic function: Fock trace " << fock << " vs closed form " << analytic;
    throw ConsistencyError(msg.str());
  }
  return fock;
}

ApproxCodespace approx_gkp_codespace(const SymplecticLattice& L, const EnvelopeParams& params, int cutoff,
                                     double radius, bool check_convergence) {
  if (params.delta < 0.08) throw ValidationError("finite-energy GKP codes need delta >= 0.08");
  const DualBasis db = qubit_dual_basis(L);
  const int M = cutoff > 0 ? cutoff : static_cast<int>(std::ceil(12.0 / (params.delta * params.delta)));
  if (M > 20000) throw ValidationError("Fock cutoff above 20000 requested");
  const double R = radius > 0.0 ? radius : 6.0 * std::max(1.0 / std::sqrt(params.T()), db.lambda1);
  ApproxCodespace cs = build_codespace(db, params, M, R);
  if (check_convergence) {
    const int M2 = static_cast<int>(std::ceil(1.25 * M));
    const ApproxCodespace big = build_codespace(db, params, M2, R);
    // Drift is measured on the squared-norm scale: the weight that moves
    // when the cutoff grows by 25%.
    double drift = 0.0;
    for (int i = 0; i < 2; ++i) {
      Eigen::VectorXcd padded = Eigen::VectorXcd::Zero(M2);
      padded.head(M) = cs.states[i];
      drift = std::max(drift, (padded - big.states[i]).squaredNorm());
    }
    cs.norm_drift = drift;
    if (drift > 1e-6) {
      std::ostringstream msg;
      msg << "codespace not converged at cutoff " << M << ": states move by " << drift << " at cutoff " << M2;
      throw TruncationError(msg.str());
    }
  }
  return cs;
}

FockOperator maximally_mixed_state(const ApproxCodespace& cs) {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(cs.cutoff, cs.cutoff);
  for (const auto& u : cs.states) rho += 0.5 * u * u.adjoint();
  return FockOperator(std::move(rho), true);
}

WeightPair approx_weights(const ApproxCodespace& cs, std::span<const double> r_grid, AngularQuadrature quad) {
  if (r_grid.size() < 4) throw ValidationError("approx_weights needs at least four radii");
  for (std::size_t i = 1; i < r_grid.size(); ++i)
    if (!(r_grid[i] > r_grid[i - 1])) throw ValidationError("radii must be strictly increasing");
  if (r_grid.front() < 0.0) throw ValidationError("radii must be non-negative");
  std::vector<double> A(r_grid.size()), B(r_grid.size());
  // Exact pass for the normalization of the resolution check.
  std::vector<PairCoeffs> coeffs(r_grid.size());
  parallel_for(r_grid.size(), [&](std::size_t i) { coeffs[i] = angular_coefficients(cs, r_grid[i]); });
  double scale = 0.0;
  for (std::size_t i = 0; i < r_grid.size(); ++i) scale = std::max(scale, fourier_integrals(coeffs[i], r_grid[i]).B);
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    CircleIntegrals c;
    if (quad.method == AngularQuadrature::Method::fourier) {
      c = fourier_integrals(coeffs[i], r_grid[i]);
    } else {
      if (quad.nodes < 4) throw ValidationError("angular quadrature needs at least 4 nodes");
      const CircleIntegrals coarse = trapezoid_integrals(coeffs[i], r_grid[i], quad.nodes);
      c = trapezoid_integrals(coeffs[i], r_grid[i], 2 * quad.nodes);
      const double change = std::max(std::abs(c.A - coarse.A), std::abs(c.B - coarse.B)) / std::max(scale, 1e-300);
      if (change > 1e-6) {
        std::ostringstream msg;
        msg << "angular quadrature under-resolved at r = " << r_grid[i] << " with " << quad.nodes
            << " nodes (relative change " << change << " on doubling)";
        throw AccuracyError(msg.str(), c.B, change);
      }
    }
    A[i] = std::max(c.A, 0.0);
    B[i] = std::max(c.B, 0.0);
  }
  std::vector<double> r(r_grid.begin(), r_grid.end());
  std::map<std::string, std::string> meta{{"model", "gkp-approx"},
                                          {"delta", std::to_string(cs.delta)},
                                          {"cutoff", std::to_string(cs.cutoff)},
                                          {"K", "2"}};
  WeightDistribution WA(1.0, RadialFunction::sampled(r, A, DecayHint::gaussian(1.0 / cs.delta)), {}, meta);
  WeightDistribution WB(1.0, RadialFunction::sampled(r, B, DecayHint::gaussian(1.0 / cs.delta)), {}, meta);
  return {std::move(WA), std::move(WB)};
}

EpsilonPoint approx_epsilon_at(const ApproxCodespace& cs, double r, AngularQuadrature quad) {
  if (r == 0.0) return {0.0, 0.0, 0.0};
  const CircleIntegrals c = circle_integrals(cs, r, quad, 0.0);
  EpsilonPoint p;
  p.r = r;
  p.B = c.B;
  p.eps = c.B > 0.0 ? std::clamp(c.num / (2.0 * c.B), 0.0, 1.0) : 0.0;
  return p;
}

ApproxEpsilon approx_qedc_epsilon(const ApproxCodespace& cs, double delta_margin, int grid_points) {
  if (!(delta_margin > 0.0)) throw ValidationError("margin must be positive");
  if (!(delta_margin < 0.5 * cs.lambda1_dual)) throw ValidationError("margin must be below lambda1_dual / 2");
  if (grid_points < 4) throw ValidationError("epsilon scan needs at least four points");
  ApproxEpsilon out;
  out.d = 0.5 * cs.lambda1_dual - delta_margin;
  out.delta = cs.delta;
  out.cutoff = cs.cutoff;
  out.r.resize(grid_points);
  out.curve.resize(grid_points);
  parallel_for(static_cast<std::size_t>(grid_points), [&](std::size_t i) {
    out.r[i] = out.d * static_cast<double>(i + 1) / grid_points;
    out.curve[i] = approx_epsilon_at(cs, out.r[i]).eps;
  });
  const auto it = std::max_element(out.curve.begin(), out.curve.end());
  const std::size_t k = static_cast<std::size_t>(it - out.curve.begin());
  out.eps = *it;
  out.argmax = out.r[k];
  const double lo = k > 0 ? out.r[k - 1] : 0.0;
  const double hi = k + 1 < out.r.size() ? out.r[k + 1] : out.r[k];
  if (hi > lo) {
    // log scale keeps the golden-section comparisons meaningful for tiny eps.
    const auto m = golden_section_max(
        [&](double r) { return std::log(std::max(approx_epsilon_at(cs, r).eps, 1e-300)); }, lo, hi, 1e-10);
    const double refined = std::exp(m.value);
    if (refined > out.eps) {
      out.eps = refined;
      out.argmax = m.x;
    }
  }
  return out;
}

ApproxEpsilon approx_qedc_epsilon(const SymplecticLattice& L, const EnvelopeParams& params, double delta_margin,
                                  int grid_points) {
  return approx_qedc_epsilon(approx_gkp_codespace(L, params), delta_margin, grid_points);
}

SlopeFit fit_epsilon_slope(const SymplecticLattice& L, double delta_margin, std::span<const double> deltas) {
  if (deltas.size() < 2) throw ValidationError("slope fit needs at least two envelope widths");
  SlopeFit fit;
  double lambda = 0.0;
  for (double d : deltas) {
    const ApproxCodespace cs = approx_gkp_codespace(L, EnvelopeParams(d));
    lambda = cs.lambda1_dual;
    const ApproxEpsilon e = approx_qedc_epsilon(cs, delta_margin);
    if (!(e.eps > 0.0)) throw NumericalError("epsilon vanished to working precision; slope fit impossible");
    fit.deltas.push_back(d);
    fit.eps.push_back(e.eps);
  }
  const std::size_t n = fit.deltas.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = 1.0 / (fit.deltas[i] * fit.deltas[i]);
    const double y = std::log(fit.eps[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) throw ValidationError("slope fit needs distinct envelope widths");
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.reference = -lambda * delta_margin / 8.0;
  fit.relative_deviation = std::abs(fit.slope - fit.reference) / std::abs(fit.reference);
  return fit;
}

FidelityResult fidelity_identities(const FockOperator& rho, double r, int nodes) {
  if (std::abs(rho.trace() - Complex{1.0, 0.0}) > 1e-9) throw ValidationError("state must have unit trace");
  if (!(r >= 0.0) || !std::isfinite(r)) throw ValidationError("radius must be finite and non-negative");
  if ((rho.matrix() - rho.matrix().adjoint()).norm() > 1e-10) throw ValidationError("state must be hermitian");
  if (nodes < 1) throw ValidationError("need at least one angular node");
  if (r * r > kMaxSquaredDisplacement) throw ValidationError("radius too large for the number-basis recurrence");
  // rho = sum_i w_i |v_i><v_i| restricted to its numerically non-zero
  // spectrum, so each angle needs only D V rather than dense products.
  const int M = rho.cutoff();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho.matrix());
  const Eigen::VectorXd& w_all = eig.eigenvalues();
  const double wmax = w_all.cwiseAbs().maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < M; ++i)
    if (std::abs(w_all[i]) > 1e-15 * wmax) keep.push_back(i);
  const int rank = static_cast<int>(keep.size());
  Eigen::MatrixXcd V(M, rank);
  Eigen::VectorXd w(rank);
  for (int i = 0; i < rank; ++i) {
    V.col(i) = eig.eigenvectors().col(keep[i]);
    w[i] = w_all[keep[i]];
  }
  std::vector<double> fe(nodes), stay(nodes);
  for (int l = 0; l < nodes; ++l) {
    const double theta = 2.0 * kPi * l / nodes;
    const Eigen::MatrixXcd D = displacement_block(r * std::cos(theta), r * std::sin(theta), M);
    const Eigen::MatrixXcd G = V.adjoint() * D * V;  // <v_i|D|v_j>
    Complex tr{};
    double st = 0.0;
    for (int i = 0; i < rank; ++i) {
      tr += w[i] * G(i, i);
      for (int j = 0; j < rank; ++j) st += w[i] * w[j] * std::norm(G(i, j));
    }
    fe[l] = std::norm(tr);
    stay[l] = st;
  }
  FidelityResult out;
  for (int l = 0; l < nodes; ++l) {
    out.entanglement_fidelity += fe[l] / nodes;
    out.stay_probability += stay[l] / nodes;
  }
  return out;
}

SecondMomentChain second_moment_chain(const SymplecticLattice& L, const ApproxCodespace& cs, double r_max,
                                      int scan_points) {
  if (scan_points < 2) throw ValidationError("occupation scan needs at least two points per axis");
  SecondMomentChain out;
  Complex a_mean{};
  for (const auto& u : cs.states) {
    for (int n = 0; n < cs.cutoff; ++n) {
      out.nbar += 0.5 * n * std::norm(u[n]);
      if (n + 1 < cs.cutoff) a_mean += 0.5 * std::sqrt(n + 1.0) * std::conj(u[n]) * u[n + 1];
    }
  }
  out.min_occupation_exact = out.nbar - std::norm(a_mean);
  // Displacing by alpha adds 2 Re(conj(alpha) <a>) + |alpha|^2 to the occupation.
  const Eigen::MatrixXd& G = L.generator();
  out.min_occupation_scan = std::numeric_limits<double>::infinity();
  for (int i = 0; i < scan_points; ++i) {
    for (int j = 0; j < scan_points; ++j) {
      const double s = -0.5 + static_cast<double>(i) / (scan_points - 1);
      const double t = -0.5 + static_cast<double>(j) / (scan_points - 1);
      const Eigen::Vector2d xi = s * G.row(0).transpose() + t * G.row(1).transpose();
      const Complex alpha(xi(0) / std::sqrt(2.0), xi(1) / std::sqrt(2.0));
      const double occ = out.nbar + 2.0 * (std::conj(alpha) * a_mean).real() + std::norm(alpha);
      out.min_occupation_scan = std::min(out.min_occupation_scan, occ);
    }
  }
  // B of rho = Pi / 2 is B of Pi divided by K^2 = 4.
  const double R = r_max > 0.0 ? r_max : std::min(7.0 / cs.delta, std::sqrt(kMaxSquaredDisplacement));
  const int panels = static_cast<int>(std::ceil(R / 0.5));
  const AngularQuadrature exact{AngularQuadrature::Method::fourier, 0};
  out.b_moment = integrate_composite(
                     [&](double r) { return 0.25 * circle_integrals(cs, r, exact, 0.0).B * r * r; }, 0.0, R, panels, 16) /
                 (4.0 * kPi);
  out.upper = 4.0 * out.nbar + 3.0;
  return out;
}

}  // namespace cvmw
