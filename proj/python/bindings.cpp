// Python bindings. Schemes, weights and boxes cross the boundary as JSON
// strings in the same shape as the config files; the Python package wraps
// them with dicts.

#include "qcdiff/cases.hpp"
#include "qcdiff/diffraction.hpp"
#include "qcdiff/io.hpp"
#include "qcdiff/lattice.hpp"
#include "qcdiff/modelset.hpp"

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace py = pybind11;
using namespace qcdiff;

namespace {

std::vector<double> to_list(const Vec& v) { return {v.data(), v.data() + v.size()}; }

std::vector<std::vector<double>> to_rows(const Mat& m) {
  std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  return rows;
}

CutProjectScheme scheme_of(const std::string& s) { return scheme_from_json(json::parse(s)); }
WeightFunction weight_of(const std::string& s) { return weight_from_json(json::parse(s)); }
Box box_of(const std::string& s) { return box_from_json(json::parse(s)); }

py::dict scheme_info(const std::string& scheme) {
  const auto s = scheme_of(scheme);
  py::dict out;
  out["d"] = s.physical_dim();
  out["m"] = s.internal_dim();
  out["basis"] = to_rows(s.basis());
  out["dual_basis"] = to_rows(s.dual_basis());
  out["density"] = s.density();
  return out;
}

using PointRow = std::tuple<std::vector<double>, std::vector<double>, std::vector<long long>>;

std::vector<PointRow> enumerate(const std::string& scheme, const std::string& physical, const std::string& internal) {
  std::vector<PointRow> rows;
  for (const auto& p : enumerate_points(scheme_of(scheme), box_of(physical), box_of(internal)))
    rows.emplace_back(to_list(p.x), to_list(p.y), p.coords);
  return rows;
}

std::tuple<std::vector<std::vector<double>>, std::vector<cplx>> materialize_comb(const std::string& scheme,
                                                                                const std::string& weight,
                                                                                const std::string& box,
                                                                                double tail_eps) {
  const auto m = materialize({scheme_of(scheme), weight_of(weight)}, box_of(box), tail_eps);
  std::vector<std::vector<double>> xs;
  xs.reserve(m.points.size());
  for (const auto& p : m.points) xs.push_back(to_list(p.x));
  return {xs, m.weights};
}

std::vector<py::dict> diffraction(const std::string& scheme, const std::string& weight, const std::string& box,
                                  double amp_eps, bool allow_non_w0) {
  const auto peaks = analytic_diffraction({scheme_of(scheme), weight_of(weight)}, box_of(box), amp_eps, allow_non_w0);
  std::vector<py::dict> out;
  for (const auto& p : peaks.peaks) {
    py::dict d;
    d["frequency"] = to_list(p.frequency);
    d["internal"] = to_list(p.internal);
    d["amplitude"] = p.amplitude;
    d["intensity"] = p.intensity;
    out.push_back(d);
  }
  return out;
}

py::dict psf(const std::string& scheme, const std::string& g, const std::string& h, double radius) {
  const auto r = psf_verify(scheme_of(scheme), weight_of(g), weight_of(h), radius);
  py::dict d;
  d["lhs"] = r.lhs;
  d["rhs"] = r.rhs;
  d["residual"] = r.residual;
  d["tail_bound"] = r.tail_bound;
  d["roundoff_bound"] = r.roundoff_bound;
  d["pass"] = r.pass;
  return d;
}

std::string run(const std::string& command, const std::string& config, std::optional<std::string> out_dir,
                const std::string& config_dir, int max_n, std::optional<std::uint64_t> seed) {
  RunOptions opt;
  if (out_dir) opt.out_dir = *out_dir;
  opt.config_dir = config_dir;
  opt.max_n = max_n;
  opt.seed = seed;
  CaseResult r;
  {
    py::gil_scoped_release release;
    r = run_command(command, json::parse(config), opt);
  }
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"limit", c.limit}, {"detail", c.detail}});
  return json{{"command", r.command}, {"pass", r.pass()}, {"checks", checks}, {"report", r.report}}.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "qcdiff engine";
  auto base = py::register_exception<Error>(m, "QcdiffError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<UnsupportedWeightError>(m, "UnsupportedWeightError", base.ptr());

  m.def("scheme_info", &scheme_info, py::arg("scheme"));
  m.def("enumerate_points", &enumerate, py::arg("scheme"), py::arg("physical_box"), py::arg("internal_box"));
  m.def("materialize", &materialize_comb, py::arg("scheme"), py::arg("weight"), py::arg("box"),
        py::arg("tail_eps") = 1e-12);
  m.def("analytic_diffraction", &diffraction, py::arg("scheme"), py::arg("weight"), py::arg("freq_box"),
        py::arg("amp_eps"), py::arg("allow_non_w0") = false);
  m.def("psf_verify", &psf, py::arg("scheme"), py::arg("g"), py::arg("h"), py::arg("radius"));
  m.def("command_names", &command_names);
  m.def("run_command", &run, py::arg("command"), py::arg("config"), py::arg("out_dir") = py::none(),
        py::arg("config_dir") = "", py::arg("max_n") = 0, py::arg("seed") = py::none());
}
