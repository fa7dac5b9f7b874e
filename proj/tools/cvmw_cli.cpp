// Command-line front end: weight curves, MacWilliams transforms, bound
// evaluations and finite-energy GKP diagnostics as CSV / JSON artifacts.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <unistd.h>

#include "cvmw/bounds.hpp"
#include "cvmw/errors.hpp"
#include "cvmw/gkp_approx.hpp"
#include "cvmw/hankel.hpp"
#include "cvmw/lattice.hpp"
#include "cvmw/parallel.hpp"
#include "cvmw/version.hpp"
#include "cvmw/weights.hpp"

namespace {

using json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kValidation = 2, kNumerical = 3, kValidity = 4 };

// Raised by handlers for validity-window violations that also carry a JSON
// record to print.
struct ValidityExit {
  std::string message;
  json record;
};

class Manifest {
 public:
  Manifest(std::string command, std::vector<std::string> argv) : command_(std::move(command)), argv_(std::move(argv)) {
    start_ = std::chrono::steady_clock::now();
  }

  void param(const std::string& key, const std::string& value) { params_.emplace_back(key, value); }
  void param(const std::string& key, double value) { params_.emplace_back(key, num(value)); }
  void tolerance(const std::string& key, double value) { tolerances_.emplace_back(key, num(value)); }

  // Comment lines (without the leading "# ").  With SOURCE_DATE_EPOCH set the
  // timestamp comes from it and the elapsed time is omitted, so repeated runs
  // are byte-identical.
  std::vector<std::string> lines() const {
    std::vector<std::string> out;
    out.push_back("cvmw " + std::string(cvmw::kVersion) + " " + command_);
    std::string args = "args:";
    for (const auto& a : argv_) args += " " + a;
    out.push_back(args);
    for (const auto& [k, v] : params_) out.push_back("param " + k + "=" + v);
    for (const auto& [k, v] : tolerances_) out.push_back("tolerance " + k + "=" + v);
    out.push_back("timestamp " + timestamp());
    if (!deterministic()) out.push_back("elapsed_s " + num(elapsed()));
    return out;
  }

  json to_json() const {
    json j;
    j["tool"] = "cvmw";
    j["version"] = cvmw::kVersion;
    j["command"] = command_;
    json p = json::object();
    for (const auto& [k, v] : params_) p[k] = v;
    j["parameters"] = p;
    json t = json::object();
    for (const auto& [k, v] : tolerances_) t[k] = v;
    j["tolerances"] = t;
    j["timestamp"] = timestamp();
    if (!deterministic()) j["elapsed_s"] = elapsed();
    return j;
  }

  static std::string num(double v) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::setprecision(17) << v;
    return s.str();
  }

 private:
  static bool deterministic() { return std::getenv("SOURCE_DATE_EPOCH") != nullptr; }

  static std::string timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
      try {
        t = static_cast<std::time_t>(std::stoll(env));
      } catch (const std::exception&) {
        throw cvmw::ValidationError("SOURCE_DATE_EPOCH must be an integer");
      }
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  std::string command_;
  std::vector<std::string> argv_;
  std::vector<std::pair<std::string, std::string>> params_, tolerances_;
  std::chrono::steady_clock::time_point start_;
};

// Writes to `path` through a temporary file in the same directory and a
// rename, so readers never see a partial file.  "-" or "" means stdout.
void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw cvmw::ValidationError("cannot open output file " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw cvmw::ValidationError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw cvmw::ValidationError("cannot move output into place at " + path + ": " + ec.message());
  }
}

std::string comment_block(const Manifest& m) {
  std::string s;
  for (const auto& line : m.lines()) s += "# " + line + "\n";
  return s;
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 2) throw cvmw::ValidationError("grid needs at least two points");
  if (!(hi > lo) || lo < 0.0) throw cvmw::ValidationError("grid needs 0 <= rmin < rmax");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * i / (points - 1);
  return g;
}

cvmw::DecayHint parse_hint(const std::string& text, double last_r) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string{} : text.substr(colon + 1);
  auto value = [&](double fallback) {
    if (arg.empty()) return fallback;
    try {
      std::size_t used = 0;
      const double v = std::stod(arg, &used);
      if (used != arg.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw cvmw::ValidationError("bad decay hint parameter '" + arg + "'");
    }
  };
  if (head == "compact") return cvmw::DecayHint::compact(value(last_r));
  if (head == "gaussian") return cvmw::DecayHint::gaussian(value(1.0));
  if (head == "polynomial") {
    if (arg.empty()) throw cvmw::ValidationError("polynomial hint needs a power, e.g. polynomial:4");
    return cvmw::DecayHint::polynomial(value(0.0));
  }
  throw cvmw::ValidationError("decay hint must be compact[:R], gaussian[:scale] or polynomial:p");
}

cvmw::AuxFunctionTable load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cvmw::ValidationError("cannot open table " + path);
  return cvmw::read_aux_table(in, path);
}

// ---------------------------------------------------------------- commands

struct WeightsArgs {
  std::string model;
  double rmin = 0.0, rmax = 6.0;
  int points = 601;
  std::string out;
};

int run_weights(const WeightsArgs& a, Manifest& m) {
  m.param("model", a.model);
  m.param("rmin", a.rmin);
  m.param("rmax", a.rmax);
  m.param("points", Manifest::num(a.points));
  const cvmw::ModelSpec spec = cvmw::ModelSpec::parse(a.model, a.rmax);
  const cvmw::WeightPair W = cvmw::analytic_weights(spec);
  for (const auto& [k, v] : W.A.metadata()) m.param("meta." + k, v);
  const auto grid = linear_grid(a.rmin, a.rmax, a.points);
  std::ostringstream csv;
  cvmw::write_weights_csv(csv, W, grid, m.lines());
  write_output(a.out, csv.str());
  return kOk;
}

struct TransformArgs {
  std::string input, out, hint = "compact";
  double N = 1.0;
  double rmax = 0.0;
  int points = 0;
  double tail = 1e-9;
};

int run_transform(const TransformArgs& a, Manifest& m) {
  m.param("input", a.input);
  m.param("N", a.N);
  m.param("hint", a.hint);
  m.tolerance("tail_tolerance", a.tail);
  std::ifstream in(a.input);
  if (!in) throw cvmw::ValidationError("cannot open input " + a.input);
  // Read once to find the last abscissa for the default compact hint.
  std::stringstream buffer;
  buffer << in.rdbuf();
  const cvmw::WeightDistribution probe = cvmw::read_distribution_csv(buffer, a.N);
  const auto xs = probe.continuous()->abscissae();
  const cvmw::DecayHint hint = parse_hint(a.hint, xs.back());
  buffer.clear();
  buffer.seekg(0);
  const cvmw::WeightDistribution A = cvmw::read_distribution_csv(buffer, a.N, hint);
  std::vector<double> grid;
  if (a.points > 0 || a.rmax > 0.0) {
    grid = linear_grid(0.0, a.rmax > 0.0 ? a.rmax : xs.back(), a.points > 0 ? a.points : static_cast<int>(xs.size()));
  } else {
    grid.assign(xs.begin(), xs.end());
  }
  cvmw::QuadratureConfig cfg;
  cfg.tail_tolerance = a.tail;
  const cvmw::WeightDistribution B = cvmw::macwilliams_transform(A, grid, cfg);
  std::ostringstream csv;
  csv << comment_block(m) << std::setprecision(17) << "r,value\n";
  for (double r : grid) csv << r << ',' << B.density(r) << '\n';
  write_output(a.out, csv.str());
  return kOk;
}

struct BoundArgs {
  double N = 1.0, d = 1.0, eps = 0.0;
  std::string table, family = "e8", out, curve;
  int grid = 4096;
};

int run_levenshtein(const BoundArgs& a, Manifest& m) {
  m.param("N", a.N);
  m.param("d", a.d);
  m.param("eps", a.eps);
  const double dp = cvmw::d_plus(a.N);
  json rec;
  rec["bound"] = "levenshtein";
  rec["N"] = a.N;
  rec["d"] = a.d;
  rec["eps"] = a.eps;
  rec["validity"] = {{"d_plus", dp}, {"within", a.d <= dp}};
  try {
    rec["K_max"] = cvmw::levenshtein_bound(a.N, a.d, a.eps);
  } catch (const cvmw::ValidityError& e) {
    rec["error"] = e.what();
    rec["manifest"] = m.to_json();
    throw ValidityExit{e.what(), rec};
  }
  rec["sup_location"] = 0.0;
  rec["manifest"] = m.to_json();
  write_output(a.out, json_text(rec));
  return kOk;
}

int run_cohn_elkies(const BoundArgs& a, Manifest& m) {
  if (a.table.empty()) throw cvmw::ValidationError("cohn-elkies needs --table");
  m.param("N", a.N);
  m.param("d", a.d);
  m.param("eps", a.eps);
  m.param("table", a.table);
  m.param("grid", Manifest::num(a.grid));
  const cvmw::AuxFunctionTable table = load_table(a.table);
  json rec;
  rec["bound"] = "cohn-elkies";
  rec["N"] = a.N;
  rec["d"] = a.d;
  rec["eps"] = a.eps;
  const double sign_change = table.sign_change();
  rec["validity"] = {{"d_max", table.x_max()},
                     {"sign_change", std::isfinite(sign_change) ? json(sign_change) : json(nullptr)}};
  std::vector<double> grid(a.grid);
  for (int i = 0; i < a.grid; ++i) grid[i] = a.d * i / (a.grid - 1);
  try {
    const cvmw::BoundResult r = cvmw::cohn_elkies_bound(table, a.N, a.d, a.eps, grid);
    rec["K_max"] = r.K_max;
    rec["sup"] = r.sup;
    rec["sup_location"] = r.attained_at;
    rec["excluded_points"] = r.excluded;
  } catch (const cvmw::InvalidAuxiliaryError& e) {
    rec["error"] = e.what();
    rec["validity"]["violation_at"] = e.abscissa();
    rec["manifest"] = m.to_json();
    throw ValidityExit{e.what(), rec};
  }
  rec["manifest"] = m.to_json();
  write_output(a.out, json_text(rec));
  return kOk;
}

int run_magic(const BoundArgs& a, Manifest& m) {
  if (a.table.empty()) throw cvmw::ValidationError("magic needs --table");
  if (a.family != "e8" && a.family != "leech") throw cvmw::ValidationError("--family must be e8 or leech");
  m.param("family", a.family);
  m.param("d", a.d);
  m.param("table", a.table);
  m.param("grid", Manifest::num(a.grid));
  const auto family = a.family == "e8" ? cvmw::MagicFamily::e8 : cvmw::MagicFamily::leech;
  const cvmw::AuxFunctionTable table = load_table(a.table);
  const cvmw::MagicQuotient q = cvmw::magic_quotient_check(table, family, a.d, a.grid);
  // A supremum above the reference by more than the table can resolve is a
  // genuine exceedance.
  const double tol = std::max(1e-6, 10.0 * q.interpolation_error);
  m.tolerance("relative_excess", tol);
  const bool exceeds = q.relative_excess > tol;

  // Largest d (up to what the table covers) whose quotient stays at the reference.
  const double s = family == cvmw::MagicFamily::e8 ? std::sqrt(2.0) : 2.0;
  const double d_cover = std::sqrt(table.x_max() * s);
  auto passes = [&](double d) {
    return cvmw::magic_quotient_check(table, family, d, std::min(a.grid, 1024)).relative_excess <= tol;
  };
  json d_max = nullptr;
  double lo = 0.05 * d_cover, hi = d_cover;
  if (passes(lo)) {
    if (passes(hi)) {
      d_max = hi;
    } else {
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        (passes(mid) ? lo : hi) = mid;
      }
      d_max = lo;
    }
  }

  json rec;
  rec["bound"] = "magic";
  rec["family"] = a.family;
  rec["d"] = a.d;
  rec["sup"] = q.sup;
  rec["sup_location"] = q.attained_at;
  rec["reference"] = q.reference;
  rec["relative_excess"] = q.relative_excess;
  rec["interpolation_error"] = q.interpolation_error;
  rec["exceeds_reference"] = exceeds;
  rec["validity"] = {{"d_max", d_max}, {"table_x_max", table.x_max()}};
  rec["manifest"] = m.to_json();
  if (!a.curve.empty()) {
    std::ostringstream csv;
    csv << comment_block(m) << std::setprecision(17) << "x,quotient\n";
    for (std::size_t i = 0; i < q.x.size(); ++i) csv << q.x[i] << ',' << q.quotient[i] << '\n';
    write_output(a.curve, csv.str());
    rec["curve"] = a.curve;
  }
  if (exceeds) throw ValidityExit{"quotient exceeds the reference value at d = " + Manifest::num(a.d), rec};
  write_output(a.out, json_text(rec));
  return kOk;
}

struct GkpArgs {
  std::string lattice = "square", out, json_out, angular = "trapezoid";
  double delta = 0.2, margin = 0.35, rmax = 0.0;
  int points = 81, nodes = 64, cutoff = 0;
  std::vector<double> fit;
};

int run_gkp_approx(const GkpArgs& a, Manifest& m) {
  m.param("lattice", a.lattice);
  m.param("delta", a.delta);
  m.param("margin", a.margin);
  m.param("angular", a.angular);
  m.param("nodes", Manifest::num(a.nodes));
  m.tolerance("angular_doubling", 1e-6);
  m.tolerance("cutoff_drift", 1e-6);
  if (!(a.delta >= 0.08)) throw cvmw::ValidationError("--delta must be at least 0.08 (Fock cutoff grows as 12 / delta^2)");
  const cvmw::SymplecticLattice L = cvmw::catalog_lattice(a.lattice);
  const cvmw::ApproxCodespace cs = cvmw::approx_gkp_codespace(L, cvmw::EnvelopeParams(a.delta), a.cutoff);
  m.param("cutoff", Manifest::num(cs.cutoff));
  m.param("lattice_radius", cs.radius);
  cvmw::AngularQuadrature quad;
  if (a.angular == "fourier") {
    quad.method = cvmw::AngularQuadrature::Method::fourier;
  } else if (a.angular != "trapezoid") {
    throw cvmw::ValidationError("--angular must be trapezoid or fourier");
  }
  quad.nodes = a.nodes;
  const double rmax = a.rmax > 0.0 ? a.rmax : cs.lambda1_dual;
  const auto grid = linear_grid(0.0, rmax, a.points);
  const cvmw::WeightPair W = cvmw::approx_weights(cs, grid, quad);
  const cvmw::ApproxEpsilon e = cvmw::approx_qedc_epsilon(cs, a.margin);

  json rec;
  rec["lattice"] = a.lattice;
  rec["delta"] = a.delta;
  rec["margin"] = a.margin;
  rec["d"] = e.d;
  rec["eps"] = e.eps;
  rec["eps_argmax"] = e.argmax;
  rec["cutoff"] = cs.cutoff;
  rec["norm_drift"] = cs.norm_drift;
  rec["raw_overlap"] = cs.raw_overlap;
  rec["lambda1_dual"] = cs.lambda1_dual;
  if (!a.fit.empty()) {
    const cvmw::SlopeFit f = cvmw::fit_epsilon_slope(L, a.margin, a.fit);
    json jf;
    jf["deltas"] = f.deltas;
    jf["eps"] = f.eps;
    jf["slope"] = f.slope;
    jf["intercept"] = f.intercept;
    jf["reference_slope"] = f.reference;
    jf["relative_deviation"] = f.relative_deviation;
    rec["slope_fit"] = jf;
  }
  rec["manifest"] = m.to_json();

  std::ostringstream csv;
  auto lines = m.lines();
  lines.push_back("eps " + Manifest::num(e.eps) + " at r=" + Manifest::num(e.argmax) + " d=" + Manifest::num(e.d));
  cvmw::write_weights_csv(csv, W, grid, lines);
  write_output(a.out, csv.str());
  if (!a.json_out.empty() && a.json_out != a.out) {
    write_output(a.json_out, json_text(rec));
  } else if (a.json_out.empty() && !a.out.empty() && a.out != "-") {
    write_output("", json_text(rec));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  CLI::App app{"cvmw: weight distributions, MacWilliams transforms and code-size bounds for bosonic codes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cvmw::kVersion));

  WeightsArgs wa;
  auto* weights = app.add_subcommand("weights", "Write the r,A,B curves (and comb masses) of a model code");
  weights->add_option("--model", wa.model, "coherent | fock:n | cat:alpha | gkp:<lattice>")->required();
  weights->add_option("--rmin", wa.rmin, "Smallest radius");
  weights->add_option("--rmax", wa.rmax, "Largest radius (also the comb truncation)");
  weights->add_option("--points", wa.points, "Number of radii");
  weights->add_option("-o,--output", wa.out, "Output CSV (default stdout)");

  TransformArgs ta;
  auto* transform = app.add_subcommand("transform", "MacWilliams transform of a sampled distribution");
  transform->add_option("--input", ta.input, "CSV with header r,value or r,A,B")->required();
  transform->add_option("-N,--modes", ta.N, "Number of modes (half-integer >= 1/2)");
  transform->add_option("--hint", ta.hint, "Decay of the input: compact[:R], gaussian[:scale], polynomial:p");
  transform->add_option("--rmax", ta.rmax, "Output grid end (default: input abscissae)");
  transform->add_option("--points", ta.points, "Output grid size");
  transform->add_option("--tail-tolerance", ta.tail, "Absolute quadrature tail tolerance");
  transform->add_option("-o,--output", ta.out, "Output CSV (default stdout)");

  auto* bound = app.add_subcommand("bound", "Code-size bounds");
  bound->require_subcommand(1);
  BoundArgs ba;
  auto* lev = bound->add_subcommand("levenshtein", "Quantum Levenshtein bound");
  lev->add_option("-N,--modes", ba.N, "Number of modes")->required();
  lev->add_option("-d,--distance", ba.d, "Code distance")->required();
  lev->add_option("--eps", ba.eps, "Detection quality epsilon in [0, 1)");
  lev->add_option("-o,--output", ba.out, "Output JSON (default stdout)");
  auto* ce = bound->add_subcommand("cohn-elkies", "Cohn-Elkies bound from a tabulated auxiliary pair");
  ce->add_option("-N,--modes", ba.N, "Number of modes")->required();
  ce->add_option("-d,--distance", ba.d, "Code distance")->required();
  ce->add_option("--eps", ba.eps, "Detection quality epsilon in [0, 1)");
  ce->add_option("--table", ba.table, "CSV x,f,fhat")->required();
  ce->add_option("--grid", ba.grid, "Scan points on [0, d]");
  ce->add_option("-o,--output", ba.out, "Output JSON (default stdout)");
  auto* magic = bound->add_subcommand("magic", "Supremum check of a tabulated magic function");
  magic->add_option("--family", ba.family, "e8 or leech");
  magic->add_option("-d,--distance", ba.d, "Code distance")->required();
  magic->add_option("--table", ba.table, "CSV x,f,fhat")->required();
  magic->add_option("--grid", ba.grid, "Scan points on [0, 1]");
  magic->add_option("--curve", ba.curve, "Write the quotient curve x,quotient here");
  magic->add_option("-o,--output", ba.out, "Output JSON (default stdout)");

  GkpArgs ga;
  auto* gkp = app.add_subcommand("gkp-approx", "Finite-energy GKP weights and detection quality");
  gkp->add_option("--lattice", ga.lattice, "Single-mode catalog lattice with K = 2");
  gkp->add_option("--delta", ga.delta, "Envelope width (>= 0.08)");
  gkp->add_option("--margin", ga.margin, "Distance margin: d = lambda1 / 2 - margin");
  gkp->add_option("--rmax", ga.rmax, "Largest radius of the A/B curves (default lambda1)");
  gkp->add_option("--points", ga.points, "Number of radii");
  gkp->add_option("--angular", ga.angular, "trapezoid or fourier");
  gkp->add_option("--nodes", ga.nodes, "Trapezoid nodes before doubling");
  gkp->add_option("--cutoff", ga.cutoff, "Fock cutoff (default ceil(12 / delta^2))");
  gkp->add_option("--fit", ga.fit, "Envelope widths for a slope fit of log eps against 1 / delta^2")->delimiter(',');
  gkp->add_option("-o,--output", ga.out, "Output CSV (default stdout)");
  gkp->add_option("--json", ga.json_out, "Output JSON (default stdout when -o is a file)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidation;
  }

  std::string command;
  for (auto* sub : app.get_subcommands()) {
    command = sub->get_name();
    for (auto* inner : sub->get_subcommands()) command += " " + inner->get_name();
  }
  Manifest manifest(command, args);
  manifest.param("threads", Manifest::num(cvmw::configured_threads()));

  try {
    if (weights->parsed()) return run_weights(wa, manifest);
    if (transform->parsed()) return run_transform(ta, manifest);
    if (lev->parsed()) return run_levenshtein(ba, manifest);
    if (ce->parsed()) return run_cohn_elkies(ba, manifest);
    if (magic->parsed()) return run_magic(ba, manifest);
    if (gkp->parsed()) return run_gkp_approx(ga, manifest);
  } catch (const ValidityExit& v) {
    std::cerr << "cvmw: " << v.message << '\n';
    std::cout << json_text(v.record);
    return kValidity;
  } catch (const cvmw::ValidityError& e) {
    std::cerr << "cvmw: " << e.what() << " (bound " << Manifest::num(e.bound()) << ")\n";
    return kValidity;
  } catch (const cvmw::ValidationError& e) {
    std::cerr << "cvmw: invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const cvmw::NumericalError& e) {
    std::cerr << "cvmw: numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "cvmw: " << e.what() << '\n';
    return kNumerical;
  }
  return kValidation;
}
