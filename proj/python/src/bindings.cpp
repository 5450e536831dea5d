#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "uppertri/cli.hpp"
#include "uppertri/core.hpp"
#include "uppertri/factor.hpp"
#include "uppertri/infop.hpp"
#include "uppertri/range.hpp"
#include "uppertri/toeplitz.hpp"

namespace py = pybind11;
using namespace uppertri;

namespace {

py::dict violation_dict(const PatternViolation& v) {
  py::dict d;
  d["row"] = v.row;
  d["col"] = v.col;
  d["row_index"] = v.row_index.coords();
  d["col_index"] = v.col_index.coords();
  d["magnitude"] = v.magnitude;
  return d;
}

py::list violations(const std::vector<PatternViolation>& vs) {
  py::list out;
  for (const auto& v : vs) out.append(violation_dict(v));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Upper-triangular factorization of positive operators";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<PositivityError>(m, "PositivityError", PyExc_ArithmeticError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);

  py::class_<MultiIndex>(m, "MultiIndex")
      .def(py::init<std::vector<int>>())
      .def("degree", &MultiIndex::degree)
      .def("coords", &MultiIndex::coords)
      .def("__lt__", [](const MultiIndex& a, const MultiIndex& b) { return a < b; })
      .def("__eq__", [](const MultiIndex& a, const MultiIndex& b) { return a == b; })
      .def("__repr__", &MultiIndex::to_string);
  m.def("leq", [](const std::vector<int>& a, const std::vector<int>& b) { return leq(MultiIndex(a), MultiIndex(b)); },
        "Componentwise order.");

  py::class_<Window>(m, "Window")
      .def(py::init<int, int>(), py::arg("d"), py::arg("n"))
      .def("__len__", &Window::size)
      .def("indices", [](const Window& w) {
        std::vector<std::vector<int>> out;
        for (const auto& i : w.indices()) out.push_back(i.coords());
        return out;
      });

  py::class_<Pattern>(m, "Pattern")
      .def("allows_entry", &Pattern::allows_entry, py::arg("r"), py::arg("col"), py::arg("c") = 1);
  m.def("pattern_nest_tensor", py::overload_cast<int, const Window&>(&pattern_nest_tensor));
  m.def("pattern_upper", &pattern_upper);

  m.def("psd_check", [](const DenseMatrix& q) {
    const PsdReport r = psd_check(q);
    py::dict d;
    d["is_psd"] = r.is_psd;
    d["min_eig"] = r.min_eig;
    d["max_eig"] = r.max_eig;
    d["rank"] = r.rank;
    return d;
  });

  const auto factor_tuple = [](const FactorResult& f) { return py::make_tuple(f.factor, f.residual_fro, f.rank); };
  m.def("cholesky_ll", [=](const DenseMatrix& r) { return factor_tuple(cholesky_ll(r)); },
        "Lower factor L with L L* = R; returns (L, residual, rank).");
  m.def("reverse_cholesky", [=](const DenseMatrix& r) { return factor_tuple(reverse_cholesky(r)); },
        "Upper factor U with U U* = R; returns (U, residual, rank).");

  m.def("poset_feasibility", [](const DenseMatrix& q, const Pattern& pat) {
    const FeasibilityReport r = poset_feasibility(q, pat);
    py::dict d;
    d["feasible"] = r.feasible;
    d["factor"] = r.factor ? py::cast(*r.factor) : py::none();
    d["certificate"] = violations(r.certificate);
    return d;
  });
  m.def("hotel_factor", [](const DenseMatrix& q, const Pattern& pat, int extra_cols) {
    const HotelResult h = hotel_factor(q, pat, extra_cols);
    std::vector<std::vector<int>> uni;
    for (const auto& k : h.universal) uni.push_back(k.coords());
    return py::make_tuple(h.result.factor, h.result.residual_fro, uni);
  });

  m.def("gen_upper", [](int d, int c, int n, int band, std::uint64_t seed) {
    const UpperInstance inst = gen_upper(d, c, n, SupportLaw::banded(band), seed);
    return py::make_tuple(inst.u, window_extract(inst.q, inst.window));
  }, py::arg("d"), py::arg("c"), py::arg("n"), py::arg("band"), py::arg("seed"),
     "Random banded upper factor U on [0, n]^d and the window section of Q = U U*.");

  m.def("range_equal", &range_equal, py::arg("a"), py::arg("c"), py::arg("tol") = 1e-8);
  m.def("douglas_constants", [](const DenseMatrix& a, const DenseMatrix& c) {
    const DouglasConstants k = douglas_constants(a, c);
    return py::make_tuple(k.lambda, k.mu);
  });

  m.def("toeplitz_matrix", [](const std::vector<Complex>& c, int n) { return toeplitz_matrix(Symbol(c), n); });
  m.def("fejer_riesz", [](const std::vector<Complex>& c) { return fejer_riesz(Symbol(c)).coeffs; },
        "Outer factor f with |f|^2 = p, from the nonnegative coefficients of p.");
  m.def("bauer_factor", [](const std::vector<Complex>& c, int n) { return bauer_factor(Symbol(c), n).coeffs; });

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, "Runs the command line in process; returns (exit_code, stdout, stderr).");
}
