// Python bindings for the main operations.  Arrays cross the boundary as
// NumPy float64 vectors; lattices are named catalog entries or generator
// matrices (rows are basis vectors).

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <string>
#include <vector>

#include "cvmw/bounds.hpp"
#include "cvmw/errors.hpp"
#include "cvmw/gkp_approx.hpp"
#include "cvmw/hankel.hpp"
#include "cvmw/lattice.hpp"
#include "cvmw/specfun.hpp"
#include "cvmw/version.hpp"
#include "cvmw/weights.hpp"

namespace py = pybind11;
using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

namespace {

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw cvmw::ValidationError("expected a one-dimensional array");
  return std::vector<double>(a.data(), a.data() + a.size());
}

Array to_array(const std::vector<double>& v) {
  return Array(static_cast<py::ssize_t>(v.size()), v.data());
}

cvmw::DecayHint parse_hint(const std::string& kind, double param) {
  if (kind == "gaussian") return cvmw::DecayHint::gaussian(param > 0.0 ? param : 1.0);
  if (kind == "compact") return cvmw::DecayHint::compact(param);
  if (kind == "polynomial") return cvmw::DecayHint::polynomial(param);
  throw cvmw::ValidationError("hint must be 'gaussian', 'compact' or 'polynomial'");
}

py::dict weights_dict(const cvmw::WeightPair& W, const std::vector<double>& r) {
  std::vector<double> a, b;
  for (double x : r) {
    a.push_back(W.A.density(x));
    b.push_back(W.B.density(x));
  }
  py::dict d;
  d["r"] = to_array(r);
  d["A"] = to_array(a);
  d["B"] = to_array(b);
  auto comb = [](std::span<const cvmw::DeltaMass> m) {
    py::list out;
    for (const auto& x : m) out.append(py::make_tuple(x.location, x.mass));
    return out;
  };
  d["deltas_A"] = comb(W.A.discrete());
  d["deltas_B"] = comb(W.B.discrete());
  return d;
}

cvmw::AngularQuadrature quadrature(const std::string& method, int nodes) {
  if (method == "fourier") return {cvmw::AngularQuadrature::Method::fourier, nodes};
  if (method == "trapezoid") return {cvmw::AngularQuadrature::Method::trapezoid, nodes};
  throw cvmw::ValidationError("method must be 'fourier' or 'trapezoid'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of the cvmw package";
  m.attr("__version__") = cvmw::kVersion;

  // Exception types live for the whole interpreter lifetime, as the pybind11
  // documentation recommends for translated exceptions.
  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<std::array<py::object, 5>> types;
  types.call_once_and_store_result([&]() {
    py::object base = py::exception<cvmw::Error>(m, "CvmwError", PyExc_RuntimeError);
    py::object validation = py::exception<cvmw::ValidationError>(m, "ValidationError", base.ptr());
    py::object numerical = py::exception<cvmw::NumericalError>(m, "NumericalError", base.ptr());
    py::object accuracy = py::exception<cvmw::AccuracyError>(m, "AccuracyError", numerical.ptr());
    py::object validity = py::exception<cvmw::ValidityError>(m, "ValidityError", base.ptr());
    return std::array<py::object, 5>{base, validation, numerical, accuracy, validity};
  });
  py::register_exception_translator([](std::exception_ptr p) {
    const auto& t = types.get_stored();
    try {
      if (p) std::rethrow_exception(p);
    } catch (const cvmw::ValidityError& e) {
      py::object err = t[4](e.what());
      err.attr("bound") = e.bound();
      PyErr_SetObject(t[4].ptr(), err.ptr());
    } catch (const cvmw::AccuracyError& e) {
      py::set_error(t[3], e.what());
    } catch (const cvmw::NumericalError& e) {
      py::set_error(t[2], e.what());
    } catch (const cvmw::ValidationError& e) {
      py::set_error(t[1], e.what());
    } catch (const cvmw::Error& e) {
      py::set_error(t[0], e.what());
    }
  });

  // Special functions.
  m.def("bessel_j", py::overload_cast<double, double>(&cvmw::bessel_j), py::arg("nu"), py::arg("x"));
  m.def("bessel_zero", py::overload_cast<double, int>(&cvmw::bessel_zero), py::arg("nu"), py::arg("k"));
  m.def("laguerre", &cvmw::laguerre, py::arg("n"), py::arg("x"));
  m.def("zonal", &cvmw::zonal, py::arg("N"), py::arg("x"));

  // Weight distributions and the transform.
  m.def(
      "model_weights",
      [](const std::string& model, const Array& r, double r_max) {
        return weights_dict(cvmw::analytic_weights(cvmw::ModelSpec::parse(model, r_max)), to_vector(r));
      },
      py::arg("model"), py::arg("r"), py::arg("r_max") = 8.0,
      "A and B of a built-in model ('coherent', 'fock:n', 'cat:alpha', 'gkp:<lattice>') on r, plus comb masses.");
  m.def(
      "macwilliams_transform",
      [](const Array& r, const Array& values, const Array& r_grid, double N, const std::string& hint, double hint_param) {
        auto rv = to_vector(r);
        const double last = rv.empty() ? 0.0 : rv.back();
        const cvmw::DecayHint h = parse_hint(hint, hint == "compact" && hint_param <= 0.0 ? last : hint_param);
        const cvmw::WeightDistribution A(N, cvmw::RadialFunction::sampled(std::move(rv), to_vector(values), h));
        const auto grid = to_vector(r_grid);
        const auto B = cvmw::macwilliams_transform(A, grid);
        std::vector<double> out;
        for (double x : grid) out.push_back(B.density(x));
        return to_array(out);
      },
      py::arg("r"), py::arg("values"), py::arg("r_grid"), py::arg("N") = 1.0, py::arg("hint") = "compact",
      py::arg("hint_param") = 0.0, "Transform of a sampled distribution, evaluated on r_grid.");
  m.def(
      "qedc_epsilon",
      [](const std::string& model, double d, double r_max) {
        const auto spec = cvmw::ModelSpec::parse(model, r_max);
        const auto W = cvmw::analytic_weights(spec);
        const auto e = cvmw::qedc_epsilon(W.A, W.B, spec.code_dimension(), d);
        return py::make_tuple(e.eps, e.argmax);
      },
      py::arg("model"), py::arg("d"), py::arg("r_max") = 8.0, "(eps, argmax) of a built-in model at distance d.");

  // Lattices.
  m.def("lattice_generator", [](const std::string& name) { return cvmw::catalog_lattice(name).generator(); },
        py::arg("name"));
  m.def("code_size", [](const std::string& name) { return cvmw::code_size(cvmw::catalog_lattice(name)); },
        py::arg("name"));
  m.def("code_size", [](const Eigen::MatrixXd& M) { return cvmw::code_size(cvmw::SymplecticLattice(M, false)); },
        py::arg("generator"));
  m.def("gkp_distance", [](const std::string& name) { return cvmw::gkp_distance(cvmw::catalog_lattice(name)); },
        py::arg("name"));
  m.def("gkp_distance", [](const Eigen::MatrixXd& M) { return cvmw::gkp_distance(cvmw::SymplecticLattice(M, false)); },
        py::arg("generator"));
  m.def(
      "length_spectrum",
      [](const std::string& name, double r_max) {
        std::vector<std::pair<double, std::int64_t>> out;
        for (const auto& e : cvmw::length_spectrum(cvmw::catalog_lattice(name), r_max).entries)
          out.emplace_back(e.length, e.multiplicity);
        return out;
      },
      py::arg("name"), py::arg("r_max"), "List of (length, multiplicity) up to r_max.");
  m.def(
      "poisson_macwilliams_residual",
      [](const std::string& name, double s, double r_max) {
        return cvmw::poisson_macwilliams_residual(cvmw::catalog_lattice(name), s, r_max);
      },
      py::arg("name"), py::arg("s") = 1.0, py::arg("r_max") = 12.0);

  // Bounds.
  m.def("lev_f", &cvmw::lev_f, py::arg("N"), py::arg("x"));
  m.def("lev_fhat", [](double N, double y) { return cvmw::lev_fhat(N, y); }, py::arg("N"), py::arg("y"));
  m.def("levenshtein_bound", &cvmw::levenshtein_bound, py::arg("N"), py::arg("d"), py::arg("eps") = 0.0);
  m.def("d_plus", &cvmw::d_plus, py::arg("N"));
  m.def("quad_bound_constant", &cvmw::quad_bound_constant, py::arg("N"));
  m.def(
      "lemma2_supremum_check",
      [](double N, double d) {
        const auto r = cvmw::lemma2_supremum_check(N, d);
        py::dict out;
        out["at_origin"] = r.at_origin;
        out["within_guarantee"] = r.within_guarantee;
        out["sup"] = r.sup;
        out["attained_at"] = r.attained_at;
        out["origin_value"] = r.origin_value;
        return out;
      },
      py::arg("N"), py::arg("d"));

  // Finite-energy GKP codes.
  m.def(
      "approx_weights",
      [](const std::string& lattice, double delta, const Array& r, const std::string& method, int nodes) {
        const auto cs = cvmw::approx_gkp_codespace(cvmw::catalog_lattice(lattice), cvmw::EnvelopeParams(delta));
        const auto grid = to_vector(r);
        py::gil_scoped_release release;
        const auto W = cvmw::approx_weights(cs, grid, quadrature(method, nodes));
        py::gil_scoped_acquire acquire;
        return weights_dict(W, grid);
      },
      py::arg("lattice"), py::arg("delta"), py::arg("r"), py::arg("method") = "fourier", py::arg("nodes") = 64);
  m.def(
      "approx_qedc_epsilon",
      [](const std::string& lattice, double delta, double margin) {
        const auto e = cvmw::approx_qedc_epsilon(cvmw::catalog_lattice(lattice), cvmw::EnvelopeParams(delta), margin);
        py::dict out;
        out["eps"] = e.eps;
        out["argmax"] = e.argmax;
        out["d"] = e.d;
        out["cutoff"] = e.cutoff;
        out["r"] = to_array(e.r);
        out["curve"] = to_array(e.curve);
        return out;
      },
      py::arg("lattice"), py::arg("delta"), py::arg("margin"));
  m.def(
      "fit_epsilon_slope",
      [](const std::string& lattice, double margin, const std::vector<double>& deltas) {
        const auto f = cvmw::fit_epsilon_slope(cvmw::catalog_lattice(lattice), margin, deltas);
        py::dict out;
        out["slope"] = f.slope;
        out["intercept"] = f.intercept;
        out["reference"] = f.reference;
        out["relative_deviation"] = f.relative_deviation;
        out["eps"] = to_array(f.eps);
        return out;
      },
      py::arg("lattice"), py::arg("margin"), py::arg("deltas"));
}
