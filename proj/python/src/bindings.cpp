#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "widom/approx.hpp"
#include "widom/asymptotics.hpp"
#include "widom/error.hpp"
#include "widom/factor.hpp"
#include "widom/io.hpp"
#include "widom/toeplitz.hpp"
#include "widom/traces.hpp"

namespace py = pybind11;
using namespace widom;

namespace {

LaurentMatrixSeries from_map(const std::map<int, Matrix>& coeffs, std::optional<double> gamma) {
  if (coeffs.empty()) fail(ErrorKind::InvalidArgument, "at least one coefficient is required");
  const Index n = coeffs.begin()->second.rows();
  return LaurentMatrixSeries(n, {coeffs.begin(), coeffs.end()}, gamma);
}

py::dict fit_dict(const DecayFit& f) {
  py::dict d;
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : f.points) pts.emplace_back(p.n, p.magnitude);
  d["points"] = pts;
  d["slope"] = f.slope;
  d["intercept"] = f.intercept;
  d["r_squared"] = f.r_squared;
  d["slope_stderr"] = f.slope_stderr;
  d["superpolynomial"] = f.superpolynomial;
  d["target_slope"] = f.target_slope;
  d["within_band"] = f.within_band;
  return d;
}

py::dict report_dict(const ExpansionReport& r) {
  py::dict d;
  d["n"] = r.n;
  d["p"] = r.p;
  d["log_G_term"] = r.log_G_term;
  d["correction_sum"] = r.correction_sum;
  d["log_E_constant"] = r.log_E_constant;
  d["predicted"] = r.predicted;
  d["direct"] = r.direct;
  d["residual"] = r.residual;
  return d;
}

EfMethod parse_method(const std::string& s) {
  if (s == "auto") return EfMethod::Automatic;
  if (s == "hankel") return EfMethod::Hankel;
  if (s == "series") return EfMethod::SzegoSeries;
  fail(ErrorKind::InvalidArgument, "method must be auto, hankel or series");
}

ContourSpec contour_for(const LaurentMatrixSeries& a, double margin, int nodes) {
  return build_contour(estimate_spectrum(a), margin, nodes);
}

}  // namespace

PYBIND11_MODULE(_widom, m) {
  m.doc() = "Toeplitz determinant and trace asymptotics for matrix symbols";

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::object(py::exception<Error>(m, "WidomError", PyExc_RuntimeError)); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // The exception carries the error kind name as `kind`.
      const py::object& type = error_type.get_stored();
      py::object inst = type(std::string(e.name()) + ": " + e.what());
      inst.attr("kind") = std::string(e.name());
      PyErr_SetObject(type.ptr(), inst.ptr());
    }
  });

  py::class_<LaurentMatrixSeries>(m, "Symbol")
      .def(py::init(&from_map), py::arg("coeffs"), py::arg("gamma") = std::nullopt,
           "Blocks keyed by Fourier offset; all blocks share one square shape.")
      .def_static("scalar", [](const std::map<int, Complex>& c) { return LaurentMatrixSeries::scalar(c); })
      .def_static("identity", &LaurentMatrixSeries::identity)
      .def_property_readonly("block_size", &LaurentMatrixSeries::block_size)
      .def_property_readonly("min_offset", &LaurentMatrixSeries::min_offset)
      .def_property_readonly("max_offset", &LaurentMatrixSeries::max_offset)
      .def_property_readonly("gamma", &LaurentMatrixSeries::smoothness)
      .def("coeff", &LaurentMatrixSeries::coeff)
      .def("coeffs", [](const LaurentMatrixSeries& a) { return std::map<int, Matrix>(a.coeffs()); })
      .def("__call__", [](const LaurentMatrixSeries& a, double theta) { return evaluate(a, theta); })
      .def("reverse", [](const LaurentMatrixSeries& a) { return reverse(a); })
      .def("to_json", [](const LaurentMatrixSeries& a) { return io::symbol_to_json(a); })
      .def_static("from_json", &io::symbol_from_json)
      .def("__repr__", [](const LaurentMatrixSeries& a) {
        return "<Symbol N=" + std::to_string(a.block_size()) + " offsets " + std::to_string(a.min_offset()) +
               ".." + std::to_string(a.max_offset()) + ">";
      });

  m.def("zygmund_test_symbol",
        py::overload_cast<double, int, std::uint64_t>(&zygmund_test_symbol), py::arg("gamma"),
        py::arg("levels") = 8, py::arg("seed") = 0);
  m.def("read_symbol", &io::read_symbol);
  m.def("write_symbol", &io::write_symbol);

  py::class_<WHFactors>(m, "Factors")
      .def_readonly("u_minus", &WHFactors::u_minus)
      .def_readonly("u_plus", &WHFactors::u_plus)
      .def_readonly("v_plus", &WHFactors::v_plus)
      .def_readonly("v_minus", &WHFactors::v_minus)
      .def_readonly("u_minus_inv", &WHFactors::u_minus_inv)
      .def_readonly("u_plus_inv", &WHFactors::u_plus_inv)
      .def_readonly("v_plus_inv", &WHFactors::v_plus_inv)
      .def_readonly("v_minus_inv", &WHFactors::v_minus_inv)
      .def_readonly("method", &WHFactors::method)
      .def_property_readonly("residuals", [](const WHFactors& w) {
        py::dict d;
        d["product_residual_right"] = w.residuals.product_residual_right;
        d["product_residual_left"] = w.residuals.product_residual_left;
        d["leakage"] = w.residuals.leakage;
        d["inverse_margin"] = w.residuals.inverse_margin;
        d["section"] = w.residuals.section;
        return d;
      });

  m.def("canonical_wh", &canonical_wh, py::arg("a"), py::arg("m") = 256);
  m.def("b_c", [](const WHFactors& w) {
    auto bc = b_c_from_factors(w);
    return py::make_tuple(bc.b, bc.c);
  });

  m.def("log_det", &log_det_direct, py::arg("a"), py::arg("n"), "log det T_n(a), n + 1 blocks");
  m.def("geometric_mean", &geometric_mean_G);
  m.def("szego_constant", [](const LaurentMatrixSeries& a) { return szego_constant_E(a); });
  m.def(
      "bs_expansion",
      [](const LaurentMatrixSeries& a, int n, int p) { return report_dict(bs_expansion(a, n, p, canonical_wh(a))); },
      py::arg("a"), py::arg("n"), py::arg("p") = 1);
  m.def(
      "remainder_scan",
      [](const LaurentMatrixSeries& a, const std::vector<int>& grid, int p) {
        return fit_dict(remainder_scan(a, grid, p, canonical_wh(a)));
      },
      py::arg("a"), py::arg("n_grid"), py::arg("p") = 1);

  m.def(
      "G_f", [](const LaurentMatrixSeries& a, const std::string& f) { return G_f(a, ScalarFunction::parse(f)); },
      py::arg("a"), py::arg("f") = "square");
  m.def(
      "E_f",
      [](const LaurentMatrixSeries& a, const std::string& f, double margin, int nodes, const std::string& method) {
        EfOptions o;
        o.method = parse_method(method);
        return E_f(a, ScalarFunction::parse(f), contour_for(a, margin, nodes), o);
      },
      py::arg("a"), py::arg("f") = "square", py::arg("margin") = 0.5, py::arg("nodes") = 128,
      py::arg("method") = "auto");
  m.def(
      "trace_direct",
      [](const LaurentMatrixSeries& a, int n, const std::string& f) {
        return trace_f_direct(a, n, ScalarFunction::parse(f));
      },
      py::arg("a"), py::arg("n"), py::arg("f") = "square");
  m.def(
      "trace_asymptotic",
      [](const LaurentMatrixSeries& a, int n, const std::string& f, double margin, int nodes) {
        return trace_f_asymptotic(a, n, ScalarFunction::parse(f), contour_for(a, margin, nodes));
      },
      py::arg("a"), py::arg("n"), py::arg("f") = "square", py::arg("margin") = 0.5, py::arg("nodes") = 128);

  m.def(
      "near_best",
      [](const LaurentMatrixSeries& f, int n) {
        auto r = near_best_laurent_approx(f, n);
        return py::make_tuple(r.poly, r.error, std::string(r.method));
      },
      py::arg("f"), py::arg("n"), "Returns (polynomial, sup error, method).");
  m.def("sup_distance", &sup_distance);
  m.def(
      "jackson_decay_check",
      [](const LaurentMatrixSeries& f, double gamma, const std::vector<int>& grid) {
        const auto r = jackson_decay_check(f, gamma, grid);
        py::dict d;
        d["gamma_estimate"] = r.gamma_estimate;
        std::vector<std::pair<double, double>> errs;
        for (const auto& p : r.per_n_errors) errs.emplace_back(p.n, p.magnitude);
        d["per_n_errors"] = errs;
        d["seminorm_estimate"] = r.seminorm_estimate;
        d["jackson_constant"] = r.jackson_constant;
        d["fit"] = fit_dict(r.fit);
        return d;
      },
      py::arg("f"), py::arg("gamma"), py::arg("n_grid") = std::vector<int>{4, 8, 16, 32, 64});
}
