#include "cvmw/weights.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cvmw/errors.hpp"
#include "cvmw/lattice.hpp"
#include "cvmw/quadrature.hpp"
#include "cvmw/specfun.hpp"

namespace cvmw {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ValidationError("cannot parse " + what + " from '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(v)) throw ValidationError("cannot parse " + what + " from '" + text + "'");
  return v;
}

}  // namespace

void CodeParams::validate() const {
  if (N < 1) throw ValidationError("code parameters: N must be a positive integer");
  if (!(K >= 1.0) || !std::isfinite(K)) throw ValidationError("code parameters: K must be finite and >= 1");
  if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("code parameters: d must be finite and positive");
  if (!(eps >= 0.0 && eps < 1.0)) throw ValidationError("code parameters: eps must lie in [0, 1)");
}

ModelSpec ModelSpec::parse(const std::string& text, double r_max) {
  ModelSpec m;
  m.r_max = r_max;
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string{} : text.substr(colon + 1);
  if (head == "coherent") {
    if (!arg.empty()) throw ValidationError("model 'coherent' takes no argument");
    m.kind = Kind::coherent;
  } else if (head == "fock") {
    const double n = parse_number(arg, "Fock level");
    if (n < 0 || n != std::floor(n) || n > 10000) throw ValidationError("Fock level must be an integer in [0, 10000]");
    m.kind = Kind::fock;
    m.fock_n = static_cast<int>(n);
  } else if (head == "cat") {
    m.kind = Kind::cat;
    m.alpha = parse_number(arg, "cat amplitude");
    if (!(m.alpha > 0.0)) throw ValidationError("cat amplitude must be positive");
  } else if (head == "gkp") {
    if (arg.empty()) throw ValidationError("model 'gkp' needs a lattice name, e.g. gkp:square");
    m.kind = Kind::gkp;
    m.lattice = arg;
  } else {
    throw ValidationError("unknown model '" + text + "' (expected coherent, fock:n, cat:alpha or gkp:lattice)");
  }
  if (!(m.r_max > 0.0)) throw ValidationError("r_max must be positive");
  return m;
}

std::string ModelSpec::label() const {
  switch (kind) {
    case Kind::coherent: return "coherent";
    case Kind::fock: return "fock:" + std::to_string(fock_n);
    case Kind::cat: return "cat:" + fmt(alpha);
    case Kind::gkp: return "gkp:" + lattice;
  }
  return "?";
}

double ModelSpec::code_dimension() const {
  switch (kind) {
    case Kind::coherent:
    case Kind::fock: return 1.0;
    case Kind::cat: return 2.0;
    case Kind::gkp: return std::round(code_size(catalog_lattice(lattice)));
  }
  return 1.0;
}

WeightPair analytic_weights(const ModelSpec& model) {
  switch (model.kind) {
    case ModelSpec::Kind::coherent: {
      auto f = RadialFunction::closed_form(
          "coherent", {}, [](double r) { return 2.0 * kPi * r * std::exp(-0.5 * r * r); }, DecayHint::gaussian(1.0));
      std::map<std::string, std::string> meta{{"model", "coherent"}, {"K", "1"}, {"trPi2", "1"}};
      return {WeightDistribution(1.0, f, {}, meta), WeightDistribution(1.0, f, {}, meta)};
    }
    case ModelSpec::Kind::fock: {
      const int n = model.fock_n;
      auto f = RadialFunction::closed_form(
          "fock", {static_cast<double>(n)},
          [n](double r) {
            const double l = laguerre(n, 0.5 * r * r);
            return 2.0 * kPi * r * l * l * std::exp(-0.5 * r * r);
          },
          DecayHint::gaussian(1.0));
      std::map<std::string, std::string> meta{{"model", model.label()}, {"K", "1"}, {"trPi2", "1"}};
      return {WeightDistribution(1.0, f, {}, meta), WeightDistribution(1.0, f, {}, meta)};
    }
    case ModelSpec::Kind::cat: {
      const double a = model.alpha;
      auto A = RadialFunction::closed_form(
          "cat_A", {a}, [a](double r) { return 4.0 * kPi * r * std::exp(-0.5 * r * r) * (1.0 + bessel_j(0.0, 2.0 * a * r)); },
          DecayHint::gaussian(1.0));
      // e^{-r^2/2} e^{-2a^2} I0(2ar) = e^{-(r-2a)^2/2} [e^{-2ar} I0(2ar)], which never overflows.
      auto B = RadialFunction::closed_form(
          "cat_B", {a},
          [a](double r) {
            const double shifted = r - 2.0 * a;
            return 4.0 * kPi * r *
                   (std::exp(-0.5 * r * r) + std::exp(-0.5 * shifted * shifted) * bessel_i0_scaled(2.0 * a * r));
          },
          DecayHint::gaussian(1.0 + 2.0 * a));
      // The projector drops the overlap of the two coherent components, so
      // tr Pi^2 is 2(1 + e^{-2 a^2}) rather than 2.
      const double defect = std::exp(-2.0 * a * a);
      std::map<std::string, std::string> meta{
          {"model", model.label()}, {"K", "2"}, {"trPi2", fmt(2.0 * (1.0 + defect))}, {"normalization_defect", fmt(defect)}};
      if (a < 2.0) {
        meta["warning"] = "cat amplitude below 2: the overlap-free closed forms are inaccurate in this regime";
      }
      return {WeightDistribution(1.0, A, {}, meta), WeightDistribution(1.0, B, {}, meta)};
    }
    case ModelSpec::Kind::gkp: {
      const SymplecticLattice L = catalog_lattice(model.lattice);
      auto [A, B] = gkp_weights(L, model.r_max);
      return {A.with_metadata("model", model.label()), B.with_metadata("model", model.label())};
    }
  }
  throw ValidationError("unknown model kind");
}

double total_integral(const WeightDistribution& W, const QuadratureConfig& cfg) {
  double total = 0.0;
  if (W.continuous()) {
    const RadialFunction& f = *W.continuous();
    DecayHint hint = f.decay();
    if (hint.kind == DecayHint::Kind::polynomial && !(hint.param > 1.0)) {
      throw ValidationError("integrability: decay power must exceed 1 for the total integral");
    }
    // phi_1(0) = 1, so the zero-frequency zonal integral is the plain integral.
    total += zonal_integral([&](double r) { return f(r); }, 1.0, 0.0, hint, cfg).value;
  }
  if (!W.discrete().empty()) {
    if (W.metadata().find("r_max") == W.metadata().end()) {
      throw ValidationError("comb distribution without an r_max truncation cannot be integrated");
    }
    total += W.discrete_mass();
  }
  return total;
}

NormalizationResult normalization_integrals(const WeightPair& W) {
  QuadratureConfig cfg;
  cfg.tail_tolerance = 1e-12;
  return {total_integral(W.A, cfg), total_integral(W.B, cfg)};
}

namespace {

double comb_mass_at(std::span<const DeltaMass> comb, double location) {
  for (const auto& d : comb)
    if (std::abs(d.location - location) <= 1e-9) return d.mass;
  return 0.0;
}

EpsilonResult comb_epsilon(const WeightDistribution& A, const WeightDistribution& B, double K, double d) {
  double max_b = 0.0;
  for (const auto& m : B.discrete()) max_b = std::max(max_b, m.mass);
  EpsilonResult res;
  bool any = false;
  for (const auto& m : B.discrete()) {
    if (!(m.location < d)) break;
    if (m.mass <= 1e-14 * max_b) {
      ++res.skipped;
      continue;
    }
    ++res.used;
    const double value = 1.0 - comb_mass_at(A.discrete(), m.location) / (K * m.mass);
    if (!any || value > res.eps) {
      res.eps = value;
      res.argmax = m.location;
      any = true;
    }
  }
  if (!any) throw NumericalError("qedc_epsilon: no usable support points below d");
  res.eps = std::clamp(res.eps, 0.0, 1.0);
  return res;
}

}  // namespace

EpsilonResult qedc_epsilon(const WeightDistribution& A, const WeightDistribution& B, double K, double d,
                           std::span<const double> grid) {
  if (!(K >= 1.0)) throw ValidationError("qedc_epsilon: K must be >= 1");
  if (!(d > 0.0) || !std::isfinite(d)) throw ValidationError("qedc_epsilon: d must be positive and finite");
  const bool combs = !A.continuous() && !B.continuous();
  if (combs) return comb_epsilon(A, B, K, d);
  if (!A.continuous() || !B.continuous() || !A.discrete().empty() || !B.discrete().empty()) {
    throw ValidationError("qedc_epsilon needs both distributions purely continuous or both pure combs");
  }
  std::vector<double> pts;
  if (grid.empty()) {
    constexpr int kDefault = 2048;
    pts.resize(kDefault);
    for (int i = 0; i < kDefault; ++i) pts[i] = d * i / kDefault;
  } else {
    for (double r : grid) {
      if (r < 0.0 || r >= d) throw ValidationError("qedc_epsilon grid must lie in [0, d)");
      pts.push_back(r);
    }
    std::sort(pts.begin(), pts.end());
  }
  std::vector<double> a(pts.size()), b(pts.size());
  double max_b = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    a[i] = A.density(pts[i]);
    b[i] = B.density(pts[i]);
    max_b = std::max(max_b, b[i]);
  }
  const double floor_b = 1e-14 * max_b;
  EpsilonResult res;
  std::size_t best = pts.size();
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(b[i] > floor_b)) {
      ++res.skipped;
      continue;
    }
    ++res.used;
    const double value = 1.0 - a[i] / (K * b[i]);
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }
  if (best == pts.size()) throw NumericalError("qedc_epsilon: no usable grid points (B negligible everywhere)");
  res.argmax = pts[best];
  // Local refinement between the neighbouring grid points.
  const double lo = best > 0 ? pts[best - 1] : pts[best];
  const double hi = best + 1 < pts.size() ? pts[best + 1] : std::min(d, pts[best] + (pts[best] - lo));
  if (hi > lo) {
    auto objective = [&](double r) {
      const double bv = B.density(r);
      if (!(bv > floor_b)) return -std::numeric_limits<double>::infinity();
      return 1.0 - A.density(r) / (K * bv);
    };
    const auto m = golden_section_max(objective, lo, std::min(hi, std::nextafter(d, 0.0)), 1e-12 * std::max(1.0, d));
    if (m.value > best_value) {
      best_value = m.value;
      res.argmax = m.x;
    }
  }
  res.eps = std::clamp(best_value, 0.0, 1.0);
  return res;
}

double b_second_moment(const WeightDistribution& B) {
  if (!B.discrete().empty()) throw ValidationError("second moment diverges for comb distributions");
  if (!B.continuous()) return 0.0;
  const RadialFunction& f = *B.continuous();
  if (f.decay().kind == DecayHint::Kind::polynomial) {
    throw ValidationError("second moment needs a gaussian or compact decay hint");
  }
  QuadratureConfig cfg;
  cfg.tail_tolerance = 1e-12;
  const auto res = zonal_integral([&](double r) { return f(r) * r * r; }, 1.0, 0.0, f.decay(), cfg);
  return res.value / (4.0 * kPi);
}

bool ordering_check(const WeightDistribution& A, const WeightDistribution& B, double K, std::span<const double> grid) {
  constexpr double kSlack = 1e-9;
  for (const auto& m : A.discrete()) {
    if (m.mass > K * comb_mass_at(B.discrete(), m.location) * (1.0 + kSlack) + kSlack * std::abs(m.mass)) {
      return false;
    }
  }
  if (A.continuous() || B.continuous()) {
    for (double r : grid) {
      const double a = A.density(r), b = B.density(r);
      if (a > K * b * (1.0 + kSlack) && a - K * b > 1e-300) return false;
    }
  }
  return true;
}

void write_weights_csv(std::ostream& out, const WeightPair& W, std::span<const double> r_grid,
                       const std::vector<std::string>& meta) {
  for (const auto& line : meta) out << "# " << line << '\n';
  out << std::setprecision(17);
  out << "r,A,B\n";
  if (W.A.continuous() || W.B.continuous()) {
    for (double r : r_grid) out << r << ',' << W.A.density(r) << ',' << W.B.density(r) << '\n';
  }
  if (!W.A.discrete().empty() || !W.B.discrete().empty()) {
    out << "#deltas\n" << "location,massA,massB\n";
    std::vector<double> locs;
    for (const auto& m : W.A.discrete()) locs.push_back(m.location);
    for (const auto& m : W.B.discrete()) locs.push_back(m.location);
    std::sort(locs.begin(), locs.end());
    double last = -1.0;
    for (double l : locs) {
      if (l - last <= 1e-9) continue;
      last = l;
      out << l << ',' << comb_mass_at(W.A.discrete(), l) << ',' << comb_mass_at(W.B.discrete(), l) << '\n';
    }
  }
}

WeightDistribution read_distribution_csv(std::istream& in, double N, std::optional<DecayHint> hint) {
  std::string line;
  int column = -1;
  std::vector<double> r, v;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("#deltas", 0) == 0) break;  // comb block is not part of the sampled input
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (column < 0) {
      if (cells.size() == 2 && cells[0] == "r" && cells[1] == "value") {
        column = 1;
      } else if (cells.size() == 3 && cells[0] == "r" && cells[1] == "A" && cells[2] == "B") {
        column = 1;
      } else {
        throw ValidationError("CSV header must be 'r,value' or 'r,A,B'");
      }
      continue;
    }
    if (cells.size() < 2) throw ValidationError("CSV line " + std::to_string(line_no) + ": too few columns");
    const double x = parse_number(cells[0], "r on line " + std::to_string(line_no));
    const double y = parse_number(cells[column], "value on line " + std::to_string(line_no));
    if (x < 0.0) throw ValidationError("CSV line " + std::to_string(line_no) + ": negative r");
    if (!r.empty() && !(x > r.back())) {
      throw ValidationError("CSV line " + std::to_string(line_no) + ": r must be strictly increasing");
    }
    r.push_back(x);
    v.push_back(y);
  }
  if (column < 0) throw ValidationError("CSV input is empty");
  if (r.size() < 2) throw ValidationError("CSV input needs at least two data rows");
  const DecayHint h = hint ? *hint : DecayHint::compact(r.back());
  return WeightDistribution(N, RadialFunction::sampled(std::move(r), std::move(v), h));
}

}  // namespace cvmw
