// Python bindings: a thin convenience layer over the C++ core. The heavy
// lifting (cell problems, sweeps, reports) stays in libhomog_core; here we
// expose plain-data entry points that round-trip through dicts and lists so
// the module has no numpy requirement.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "homog/harness.hpp"

namespace py = pybind11;
using namespace homog;

namespace {

InclusionKind kind_from(const std::string& s) {
  if (s == "none") return InclusionKind::none;
  if (s == "disk") return InclusionKind::disk;
  if (s == "ellipse") return InclusionKind::ellipse;
  if (s == "smoothed_square") return InclusionKind::smoothed_square;
  if (s == "laminate") return InclusionKind::laminate;
  throw ConfigError("unknown inclusion kind: " + s);
}

py::list mat_to_list(const Mat2& m) {
  py::list rows;
  for (int i = 0; i < 2; ++i) {
    py::list row;
    for (int j = 0; j < 2; ++j) row.append(m(i, j));
    rows.append(row);
  }
  return rows;
}

py::list tensor4_to_list(const Tensor4& t) {
  py::list out;
  for (int i = 0; i < 2; ++i) {
    py::list li;
    for (int j = 0; j < 2; ++j) {
      py::list lj;
      for (int m = 0; m < 2; ++m) {
        py::list lm;
        for (int n = 0; n < 2; ++n) lm.append(t(i, j, m, n));
        lj.append(lm);
      }
      li.append(lj);
    }
    out.append(li);
  }
  return out;
}

CellGeometry make_cell(const std::string& kind, double a_in, double a_out, int resolution,
                       double radius, std::pair<double, double> center,
                       std::pair<double, double> semi_axes, double half_width) {
  InclusionSpec inc;
  inc.kind = kind_from(kind);
  inc.center = Vec2(center.first, center.second);
  inc.radius = radius;
  inc.semi_axes = Vec2(semi_axes.first, semi_axes.second);
  inc.half_width = half_width;
  CoefficientField cf;
  cf.a_in = a_in * Mat2::Identity();
  cf.a_out = a_out * Mat2::Identity();
  return build_unit_cell(inc, cf, resolution);
}

py::dict cell_tensors(const std::string& kind, double a_in, double a_out, int resolution,
                      double radius, std::pair<double, double> center,
                      std::pair<double, double> semi_axes, double half_width, bool with_stokes,
                      double mu_pen, double tol) {
  const CellGeometry cell =
      make_cell(kind, a_in, a_out, resolution, radius, center, semi_axes, half_width);
  const ScalarCellSolution scalar = solve_correctors(cell, tol);
  py::dict out;
  out["A"] = mat_to_list(effective_permeability(cell, scalar));
  out["solid_fraction"] = cell.solid_fraction();
  py::list sup;
  sup.append(scalar.sup_omega[0]);
  sup.append(scalar.sup_omega[1]);
  out["sup_omega"] = sup;
  if (with_stokes) {
    StokesCellOptions opt;
    opt.mu_pen = mu_pen;
    opt.tol = tol;
    const StokesCellSolution stokes = solve_stokes_cell(cell, scalar, opt);
    const Tensor4 N = effective_viscosity(cell, stokes);
    out["N"] = tensor4_to_list(N);
    out["lh_beta"] = legendre_hadamard_beta(N);
    const auto B = effective_coupling(cell, stokes);
    py::list bl;
    for (int i = 0; i < 2; ++i) {
      py::list bi;
      for (int j = 0; j < 2; ++j) bi.append(mat_to_list(B[i][j]));
      bl.append(bi);
    }
    out["B"] = bl;
    double rig = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) rig = std::max(rig, stokes.chi[i][j].rigidity_residual);
    out["rigidity_residual"] = rig;
  }
  return out;
}

py::dict run_experiment(const std::string& config_text) {
  const ExperimentConfig config = parse_config_text(config_text);
  const CellPipelineResult cellres = run_cell_pipeline(config);
  const ReportBundle bundle = run_sweep(config, cellres);
  emit_reports(bundle, config);
  py::dict out;
  out["A"] = mat_to_list(bundle.tensors.A);
  out["N"] = tensor4_to_list(bundle.tensors.N);
  out["lh_beta"] = bundle.lh_beta;
  out["config_hash"] = bundle.config_hash;
  out["partial"] = bundle.partial;
  py::list rows;
  for (const SweepRow& r : bundle.rows) {
    py::dict d;
    d["epsilon"] = r.conv.epsilon;
    d["err_grad_phi"] = r.conv.err_grad_phi;
    d["err_grad_phi_nocorr"] = r.conv.err_grad_phi_nocorr;
    d["err_D_u"] = r.conv.err_D_u;
    d["err_D_u_nocorr"] = r.conv.err_D_u_nocorr;
    d["sup_grad_phi"] = r.conv.sup_grad_phi;
    d["energy_residual"] = r.conv.energy_residual;
    d["failed"] = r.failed;
    d["error"] = r.error;
    rows.append(d);
  }
  out["rows"] = rows;
  return out;
}

}  // namespace

PYBIND11_MODULE(_homog, m) {
  m.doc() = "Effective tensors and epsilon sweeps for periodic magnetizable suspensions";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<SolveError>(m, "SolveError");
  py::register_exception<InvariantError>(m, "InvariantError");

  m.def("cell_tensors", &cell_tensors,
        py::arg("kind") = "disk", py::arg("a_in") = 5.0, py::arg("a_out") = 1.0,
        py::arg("resolution") = 64, py::arg("radius") = 0.25,
        py::arg("center") = std::make_pair(0.5, 0.5),
        py::arg("semi_axes") = std::make_pair(0.25, 0.15), py::arg("half_width") = 0.25,
        py::arg("with_stokes") = false, py::arg("mu_pen") = 1e6, py::arg("tol") = 1e-10,
        "Solve the cell problems for one unit cell and return the effective "
        "tensors as nested lists.");

  m.def("run_experiment", &run_experiment, py::arg("config_text"),
        "Parse a config, run the cell pipeline and the epsilon sweep, emit "
        "reports to the configured output directory, and return a summary.");

  m.def(
      "canonical_config",
      [](const std::string& text) { return config_to_text(parse_config_text(text)); },
      py::arg("config_text"), "Parse and re-serialize a config in canonical form.");

  m.def(
      "config_hash",
      [](const std::string& text) { return parse_config_text(text).config_hash(); },
      py::arg("config_text"), "Stable content hash of a parsed config.");
}
