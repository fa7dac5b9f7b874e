#include "cvmw/lattice.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "cvmw/errors.hpp"
#include "cvmw/parallel.hpp"
#include "cvmw/quadrature.hpp"
#include "cvmw/specfun.hpp"

namespace cvmw {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMergeTolerance = 1e-9;

void check_generator(const Eigen::MatrixXd& M) {
  if (M.rows() == 0 || M.rows() != M.cols() || M.rows() % 2 != 0) {
    throw ValidationError("lattice generator must be a non-empty 2N x 2N matrix");
  }
  if (!M.allFinite()) throw ValidationError("lattice generator has non-finite entries");
  const double scale = M.cwiseAbs().maxCoeff();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  lu.setThreshold(1e-12);
  if (scale == 0.0 || lu.rank() < M.rows()) throw ValidationError("lattice generator is singular");
}

}  // namespace

Eigen::MatrixXd symplectic_form(int N) {
  if (N < 1) throw ValidationError("symplectic form needs N >= 1");
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  W.topRightCorner(N, N) = Eigen::MatrixXd::Identity(N, N);
  W.bottomLeftCorner(N, N) = -Eigen::MatrixXd::Identity(N, N);
  return W;
}

SymplecticLattice::SymplecticLattice(Eigen::MatrixXd generator, bool require_gkp, std::string name)
    : M_(std::move(generator)), name_(std::move(name)) {
  check_generator(M_);
  if (require_gkp && !is_gkp()) {
    std::ostringstream msg;
    msg << "GKP condition violated: symplectic products deviate from 2 pi Z by up to " << symplectic_defect()
        << " (in units of 2 pi)";
    throw ValidationError(msg.str());
  }
}

double SymplecticLattice::symplectic_defect() const {
  const Eigen::MatrixXd G = M_ * symplectic_form(N()) * M_.transpose() / (2.0 * kPi);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < G.rows(); ++i)
    for (Eigen::Index j = 0; j < G.cols(); ++j) worst = std::max(worst, std::abs(G(i, j) - std::round(G(i, j))));
  return worst;
}

SymplecticLattice SymplecticLattice::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("lattice scale factor must be positive");
  return SymplecticLattice(c * M_, false, name_);
}

SymplecticLattice SymplecticLattice::renamed(std::string name) const {
  SymplecticLattice copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

SymplecticLattice dual_lattice(const SymplecticLattice& L) {
  const Eigen::MatrixXd& M = L.generator();
  Eigen::MatrixXd D = 2.0 * kPi * M.inverse().transpose() * symplectic_form(L.N());
  return SymplecticLattice(std::move(D), false, L.name().empty() ? std::string{} : L.name() + "-dual");
}

double code_size(const SymplecticLattice& L) {
  return std::abs(L.generator().determinant()) / std::pow(2.0 * kPi, L.N());
}

bool contains(const SymplecticLattice& L, const Eigen::VectorXd& v, double tol) {
  if (v.size() != L.dim()) throw ValidationError("vector dimension does not match the lattice");
  const Eigen::RowVectorXd c = v.transpose() * L.generator().inverse();
  for (Eigen::Index i = 0; i < c.size(); ++i)
    if (std::abs(c(i) - std::round(c(i))) > tol) return false;
  return true;
}

bool is_sublattice(const SymplecticLattice& sub, const SymplecticLattice& super, double tol) {
  if (sub.dim() != super.dim()) return false;
  for (Eigen::Index i = 0; i < sub.generator().rows(); ++i)
    if (!contains(super, sub.generator().row(i).transpose(), tol)) return false;
  return true;
}

bool same_lattice(const SymplecticLattice& a, const SymplecticLattice& b, double tol) {
  if (a.dim() != b.dim()) return false;
  const Eigen::MatrixXd U = b.generator() * a.generator().inverse();
  IntMatrix rows(U.rows(), std::vector<std::int64_t>(U.cols()));
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    for (Eigen::Index j = 0; j < U.cols(); ++j) {
      const double r = std::round(U(i, j));
      if (std::abs(U(i, j) - r) > tol) return false;
      rows[i][j] = static_cast<std::int64_t>(r);
    }
  }
  const IntMatrix H = hermite_normal_form(rows);
  if (H.size() != rows.size()) return false;
  for (std::size_t i = 0; i < H.size(); ++i)
    for (std::size_t j = 0; j < H[i].size(); ++j)
      if (H[i][j] != (i == j ? 1 : 0)) return false;
  return true;
}

IntMatrix hermite_normal_form(IntMatrix rows) {
  if (rows.empty()) return rows;
  const std::size_t cols = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != cols) throw ValidationError("ragged integer matrix");
  auto sub_multiple = [](std::vector<std::int64_t>& target, const std::vector<std::int64_t>& src, std::int64_t q) {
    for (std::size_t j = 0; j < target.size(); ++j) {
      std::int64_t prod = 0;
      if (__builtin_mul_overflow(q, src[j], &prod) || __builtin_sub_overflow(target[j], prod, &target[j])) {
        throw NumericalError("integer overflow in Hermite normal form");
      }
    }
  };
  std::size_t pivot_row = 0;
  for (std::size_t c = 0; c < cols && pivot_row < rows.size(); ++c) {
    // Euclid on column c among rows pivot_row.. until a single nonzero remains.
    for (;;) {
      std::size_t best = rows.size();
      for (std::size_t i = pivot_row; i < rows.size(); ++i) {
        if (rows[i][c] != 0 && (best == rows.size() || std::abs(rows[i][c]) < std::abs(rows[best][c]))) best = i;
      }
      if (best == rows.size()) break;
      std::swap(rows[pivot_row], rows[best]);
      bool others = false;
      for (std::size_t i = pivot_row + 1; i < rows.size(); ++i) {
        if (rows[i][c] == 0) continue;
        sub_multiple(rows[i], rows[pivot_row], rows[i][c] / rows[pivot_row][c]);
        if (rows[i][c] != 0) others = true;
      }
      if (!others) break;
    }
    if (rows[pivot_row][c] == 0) continue;
    if (rows[pivot_row][c] < 0)
      for (auto& x : rows[pivot_row]) x = -x;
    const std::int64_t p = rows[pivot_row][c];
    for (std::size_t i = 0; i < pivot_row; ++i) {
      std::int64_t q = rows[i][c] / p;
      if (rows[i][c] - q * p < 0) --q;
      if (q != 0) sub_multiple(rows[i], rows[pivot_row], q);
    }
    ++pivot_row;
  }
  rows.resize(pivot_row);
  return rows;
}

Eigen::MatrixXd lll_reduce(const Eigen::MatrixXd& M, double delta) {
  Eigen::MatrixXd B = M;
  const Eigen::Index n = B.rows();
  Eigen::MatrixXd Bs(n, B.cols());
  Eigen::MatrixXd mu = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd norms(n);
  auto gram_schmidt = [&] {
    for (Eigen::Index i = 0; i < n; ++i) {
      Bs.row(i) = B.row(i);
      for (Eigen::Index j = 0; j < i; ++j) {
        mu(i, j) = B.row(i).dot(Bs.row(j)) / norms(j);
        Bs.row(i) -= mu(i, j) * Bs.row(j);
      }
      norms(i) = Bs.row(i).squaredNorm();
    }
  };
  gram_schmidt();
  Eigen::Index k = 1;
  int guard = 0;
  while (k < n) {
    if (++guard > 1'000'000) throw NumericalError("LLL reduction did not terminate");
    for (Eigen::Index j = k - 1; j >= 0; --j) {
      const double q = std::round(mu(k, j));
      if (q != 0.0) {
        B.row(k) -= q * B.row(j);
        for (Eigen::Index l = 0; l <= j; ++l) mu(k, l) -= q * (l == j ? 1.0 : mu(j, l));
      }
    }
    if (norms(k) >= (delta - mu(k, k - 1) * mu(k, k - 1)) * norms(k - 1)) {
      ++k;
    } else {
      B.row(k).swap(B.row(k - 1));
      gram_schmidt();
      k = std::max<Eigen::Index>(k - 1, 1);
    }
  }
  return B;
}

std::int64_t LengthSpectrum::count() const {
  std::int64_t total = 0;
  for (const auto& e : entries) total += e.multiplicity;
  return total;
}

namespace {

// Fincke-Pohst enumeration of all coefficient vectors x with x^T G x <= R2.
// Returns the squared norms found.
std::vector<double> enumerate_norms(const Eigen::MatrixXd& basis, double R2, std::int64_t budget) {
  const int n = static_cast<int>(basis.rows());
  const Eigen::MatrixXd G = basis * basis.transpose();
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw NumericalError("Gram matrix is not positive definite");
  const Eigen::MatrixXd U = llt.matrixU();  // G = U^T U, upper triangular
  const double slack = 1e-9 * std::max(1.0, R2);

  const int top = n - 1;
  const double top_span = std::sqrt(R2 + slack) / U(top, top);
  const auto top_max = static_cast<std::int64_t>(std::floor(top_span));
  const std::size_t branches = static_cast<std::size_t>(2 * top_max + 1);
  std::vector<std::vector<double>> found(branches);
  std::atomic<std::int64_t> total{0};

  parallel_for(branches, [&](std::size_t b) {
    std::vector<double> x(n, 0.0), partial(n + 1, 0.0), center(n, 0.0);
    std::vector<std::int64_t> hi(n, 0);
    auto& out = found[b];
    x[top] = static_cast<double>(static_cast<std::int64_t>(b) - top_max);
    {
      const double t = U(top, top) * x[top];
      partial[top] = t * t;
    }
    if (partial[top] > R2 + slack) return;
    // Iterative depth-first search from level top-1 down to 0.
    auto setup = [&](int i) {
      double s = 0.0;
      for (int j = i + 1; j < n; ++j) s += U(i, j) * x[j];
      center[i] = -s / U(i, i);
      const double remaining = R2 + slack - partial[i + 1];
      const double span = remaining > 0.0 ? std::sqrt(remaining) / U(i, i) : -1.0;
      if (span < 0.0) {
        hi[i] = 0;
        x[i] = 1.0;  // empty range sentinel: x > hi
        return;
      }
      x[i] = std::ceil(center[i] - span);
      hi[i] = static_cast<std::int64_t>(std::floor(center[i] + span));
    };
    if (n == 1) {
      out.push_back(partial[top]);
      total += 1;
      return;
    }
    int i = top - 1;
    setup(i);
    for (;;) {
      if (x[i] > static_cast<double>(hi[i])) {
        if (++i >= top) break;
        x[i] += 1.0;
        continue;
      }
      const double t = U(i, i) * (x[i] - center[i]);
      partial[i] = partial[i + 1] + t * t;
      if (i == 0) {
        out.push_back(partial[0]);
        if (++total > budget) throw ValidationError("lattice enumeration budget exceeded; lower r_max");
        x[0] += 1.0;
      } else {
        --i;
        setup(i);
      }
    }
  });
  std::vector<double> all;
  for (auto& v : found) all.insert(all.end(), v.begin(), v.end());
  return all;
}

LengthSpectrum group_lengths(std::vector<double> norms2, double r_max) {
  std::vector<double> lengths;
  lengths.reserve(norms2.size());
  for (double n2 : norms2) {
    const double len = std::sqrt(std::max(0.0, n2));
    if (len <= r_max + kMergeTolerance) lengths.push_back(len);
  }
  std::sort(lengths.begin(), lengths.end());
  LengthSpectrum s;
  s.r_max = r_max;
  for (double len : lengths) {
    if (!s.entries.empty() && len - s.entries.back().length <= kMergeTolerance) {
      ++s.entries.back().multiplicity;
    } else {
      s.entries.push_back({len < kMergeTolerance ? 0.0 : len, 1});
    }
  }
  return s;
}

}  // namespace

LengthSpectrum length_spectrum(const SymplecticLattice& L, double r_max, std::int64_t budget) {
  if (!(r_max > 0.0) || !std::isfinite(r_max)) throw ValidationError("r_max must be positive and finite");
  const Eigen::MatrixXd B = lll_reduce(L.generator());
  return group_lengths(enumerate_norms(B, r_max * r_max, budget), r_max);
}

double shortest_vector_length(const SymplecticLattice& L) {
  const Eigen::MatrixXd B = lll_reduce(L.generator());
  double bound = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < B.rows(); ++i) bound = std::min(bound, B.row(i).norm());
  const LengthSpectrum s = group_lengths(enumerate_norms(B, bound * bound * (1.0 + 1e-12), 10'000'000), bound * (1.0 + 1e-12));
  for (const auto& e : s.entries)
    if (e.length > 0.0) return e.length;
  return bound;
}

double gkp_distance(const SymplecticLattice& L) { return shortest_vector_length(dual_lattice(L)); }

std::pair<WeightDistribution, WeightDistribution> gkp_weights(const SymplecticLattice& L, double r_max) {
  const double K = code_size(L);
  const LengthSpectrum sL = length_spectrum(L, r_max);
  const LengthSpectrum sD = length_spectrum(dual_lattice(L), r_max);
  std::vector<DeltaMass> a, b;
  for (const auto& e : sL.entries) a.push_back({e.length, K * K * static_cast<double>(e.multiplicity)});
  for (const auto& e : sD.entries) b.push_back({e.length, K * static_cast<double>(e.multiplicity)});
  std::ostringstream rm, ks;
  rm << std::setprecision(17) << r_max;
  ks << std::setprecision(17) << K;
  std::map<std::string, std::string> meta{{"model", "gkp"}, {"lattice", L.name()}, {"r_max", rm.str()}, {"K", ks.str()}};
  return {WeightDistribution(L.N(), std::nullopt, std::move(a), meta),
          WeightDistribution(L.N(), std::nullopt, std::move(b), meta)};
}

namespace {

// Upper bound on sum_{|v| > R} h(|v|) for decreasing h.  With N(r) the
// number of lattice points in the radius-r ball, N(r) <= vol(B_{r + rho}) / covol
// where rho bounds the covering radius, and summation by parts gives
//   tail <= int_R^inf N(r) |h'(r)| dr.
double lattice_tail(const std::function<double(double)>& abs_dh, int dim, double covol, double rho, double R,
                    double width) {
  const double unit_ball = sphere_area(dim - 1, 1.0) / dim;
  return integrate_composite([&](double r) { return unit_ball * std::pow(r + rho, dim) / covol * abs_dh(r); }, R,
                             R + width, 64, 16);
}

// Half the root-sum-square of the Gram-Schmidt lengths of a reduced basis,
// a standard upper bound on the covering radius.
double covering_radius_bound(const SymplecticLattice& lat) {
  const Eigen::MatrixXd B = lll_reduce(lat.generator());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B.transpose());
  const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  return 0.5 * R.diagonal().norm();
}

}  // namespace

double poisson_macwilliams_residual(const SymplecticLattice& L, double s, double r_max) {
  if (!(s > 0.0)) throw ValidationError("gaussian scale must be positive");
  const int N = L.N();
  const int dim = 2 * N;
  const double K = code_size(L);
  const SymplecticLattice D = dual_lattice(L);
  auto g = [s](double r) { return std::exp(-r * r / (2.0 * s * s)); };
  auto ghat = [s, N](double r) { return std::pow(s, 2 * N) * std::exp(-s * s * r * r / 2.0); };

  auto comb_sum = [&](const SymplecticLattice& lat, const std::function<double(double)>& h) {
    const LengthSpectrum sp = length_spectrum(lat, r_max);
    double total = 0.0;
    // Smallest terms first.
    for (auto it = sp.entries.rbegin(); it != sp.entries.rend(); ++it)
      total += static_cast<double>(it->multiplicity) * h(it->length);
    return total;
  };
  const double left = K * comb_sum(D, g);
  const double right = K * K * comb_sum(L, ghat);

  const double covol_L = std::abs(L.generator().determinant());
  const double covol_D = std::abs(D.generator().determinant());
  auto dg = [s](double r) { return r / (s * s) * std::exp(-r * r / (2.0 * s * s)); };
  auto dghat = [s, N](double r) { return std::pow(s, 2 * N) * s * s * r * std::exp(-s * s * r * r / 2.0); };
  const double tail_left = K * lattice_tail(dg, dim, covol_D, covering_radius_bound(D), r_max, 20.0 * s);
  const double tail_right = K * K * lattice_tail(dghat, dim, covol_L, covering_radius_bound(L), r_max, 20.0 / s);
  if (tail_left > 1e-12 * left || tail_right > 1e-12 * left) {
    throw ValidationError("Poisson check: r_max too small for the Gaussian tails to fall below 1e-12");
  }
  return std::abs(left - right) / left;
}

Eigen::MatrixXd e8_generator() {
  // Work in doubled coordinates so every generator is an integer vector:
  // D8 is spanned by e_i - e_{i+1} and e_6 + e_7, and the glue is (1/2)(1, ..., 1).
  IntMatrix rows;
  for (int i = 0; i < 7; ++i) {
    std::vector<std::int64_t> r(8, 0);
    r[i] = 2;
    r[i + 1] = -2;
    rows.push_back(r);
  }
  std::vector<std::int64_t> last(8, 0);
  last[6] = 2;
  last[7] = 2;
  rows.push_back(last);
  rows.push_back(std::vector<std::int64_t>(8, 1));
  const IntMatrix H = hermite_normal_form(rows);
  Eigen::MatrixXd out(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) out(i, j) = 0.5 * static_cast<double>(H[i][j]);
  return out;
}

std::vector<std::vector<int>> golay_generator() {
  // Cyclic [23, 12] quadratic-residue code with generator
  // x^11 + x^10 + x^6 + x^5 + x^4 + x^2 + 1, extended by an overall parity bit.
  const std::vector<int> g{1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1, 1};  // coefficients of x^0..x^11
  std::vector<std::vector<int>> rows;
  for (int shift = 0; shift < 12; ++shift) {
    std::vector<int> w(24, 0);
    for (int k = 0; k < 12; ++k) w[shift + k] = g[k];
    int parity = 0;
    for (int k = 0; k < 23; ++k) parity ^= w[k];
    w[23] = parity;
    rows.push_back(std::move(w));
  }
  return rows;
}

Eigen::MatrixXd leech_generator() {
  IntMatrix rows;
  for (const auto& c : golay_generator()) {
    std::vector<std::int64_t> r(24);
    for (int j = 0; j < 24; ++j) r[j] = 2 * c[j];
    rows.push_back(r);
  }
  for (int j = 1; j < 24; ++j) {
    for (int sign : {1, -1}) {
      std::vector<std::int64_t> r(24, 0);
      r[0] = 4;
      r[j] = 4 * sign;
      rows.push_back(r);
    }
  }
  std::vector<std::int64_t> odd(24, 1);
  odd[0] = -3;
  rows.push_back(odd);
  const IntMatrix H = hermite_normal_form(rows);
  if (H.size() != 24) throw NumericalError("Leech generating set has the wrong rank");
  Eigen::MatrixXd M(24, 24);
  const double scale = 1.0 / std::sqrt(8.0);
  for (int i = 0; i < 24; ++i)
    for (int j = 0; j < 24; ++j) M(i, j) = scale * static_cast<double>(H[i][j]);
  return lll_reduce(M);
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> names{"square", "hexagonal", "selfdual:1", "e8", "e8-unit", "e8-16"};
#ifdef CVMW_WITH_LEECH
  names.push_back("leech");
#endif
  return names;
}

SymplecticLattice catalog_lattice(const std::string& name) {
  if (name == "square") {
    return SymplecticLattice(2.0 * std::sqrt(kPi) * Eigen::MatrixXd::Identity(2, 2), true, name);
  }
  if (name == "hexagonal") {
    const double a = std::sqrt(8.0 * kPi / std::sqrt(3.0));
    Eigen::MatrixXd M(2, 2);
    M << a, 0.0, 0.5 * a, 0.5 * std::sqrt(3.0) * a;
    return SymplecticLattice(M, true, name);
  }
  if (name.rfind("selfdual:", 0) == 0) {
    const int N = std::stoi(name.substr(9));
    if (N < 1 || N > 12) throw ValidationError("selfdual:N needs 1 <= N <= 12");
    return SymplecticLattice(std::sqrt(2.0 * kPi) * Eigen::MatrixXd::Identity(2 * N, 2 * N), true, name);
  }
  if (name.rfind("scaled-z:", 0) == 0) {
    const auto colon = name.find(':', 9);
    if (colon == std::string::npos) throw ValidationError("scaled-z needs the form scaled-z:N:c");
    const int N = std::stoi(name.substr(9, colon - 9));
    const double c = std::stod(name.substr(colon + 1));
    if (N < 1 || N > 12 || !(c > 0.0)) throw ValidationError("scaled-z:N:c needs 1 <= N <= 12 and c > 0");
    return SymplecticLattice(c * Eigen::MatrixXd::Identity(2 * N, 2 * N), false, name);
  }
  if (name == "e8-unit") return SymplecticLattice(std::sqrt(2.0 * kPi) * e8_generator(), true, name);
  if (name == "e8-16") return SymplecticLattice(2.0 * std::sqrt(kPi) * e8_generator(), true, name);
  if (name == "e8") {
    // The scaling that gives K = 2; see the class comment on integrality.
    return SymplecticLattice(std::pow(2.0, 0.125) * std::sqrt(2.0 * kPi) * e8_generator(), false, name);
  }
#ifdef CVMW_WITH_LEECH
  if (name == "leech") return SymplecticLattice(leech_generator(), false, name);
#endif
  throw ValidationError("unknown catalog lattice '" + name + "'");
}

SymplecticLattice read_lattice(std::istream& in, bool require_gkp) {
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      const auto pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos || line[pos] == '#') continue;
      return true;
    }
    return false;
  };
  if (!next_line()) throw ValidationError("lattice file is empty");
  int N = 0;
  {
    std::istringstream ls(line);
    if (!(ls >> N) || N < 1) throw ValidationError("lattice file: first line must be a positive mode count N");
  }
  Eigen::MatrixXd M(2 * N, 2 * N);
  for (int i = 0; i < 2 * N; ++i) {
    if (!next_line()) throw ValidationError("lattice file: expected " + std::to_string(2 * N) + " generator rows");
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    for (int j = 0; j < 2 * N; ++j) {
      if (!(ls >> M(i, j))) {
        throw ValidationError("lattice file: row " + std::to_string(i + 1) + " needs " + std::to_string(2 * N) + " numbers");
      }
    }
    std::string extra;
    if (ls >> extra) throw ValidationError("lattice file: row " + std::to_string(i + 1) + " has extra entries");
  }
  return SymplecticLattice(std::move(M), require_gkp);
}

void write_lattice(std::ostream& out, const SymplecticLattice& L) {
  out << L.N() << '\n' << std::setprecision(17);
  const auto& M = L.generator();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) out << (j ? " " : "") << M(i, j);
    out << '\n';
  }
}

void write_spectrum_csv(std::ostream& out, const LengthSpectrum& s) {
  out << "length,multiplicity\n" << std::setprecision(17);
  for (const auto& e : s.entries) out << e.length << ',' << e.multiplicity << '\n';
}

}  // namespace cvmw
