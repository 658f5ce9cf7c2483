#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ucb/carleman.hpp"
#include "ucb/continuation.hpp"
#include "ucb/experiments.hpp"
#include "ucb/norms.hpp"
#include "ucb/stokes.hpp"

namespace py = pybind11;
using namespace ucb;

namespace {

BoundaryTag tag_from(const std::string& s) {
  if (s == "S" || s == "inner") return BoundaryTag::S_inner;
  if (s == "Gamma" || s == "outer") return BoundaryTag::Gamma_outer;
  throw InvalidParams("boundary tag must be 'S' or 'Gamma'");
}

GridField as_field(const PolarGrid& g, const CVec& v) {
  if (v.size() != g.size()) throw InvalidParams("field length does not match grid");
  return GridField(v);
}

}  // namespace

PYBIND11_MODULE(_ucbench, m) {
  m.doc() = "quantitative unique continuation testbench";

  py::register_exception<InvalidGeometry>(m, "InvalidGeometry");
  py::register_exception<SingularMetric>(m, "SingularMetric");
  py::register_exception<InvalidParams>(m, "InvalidParams");
  py::register_exception<InvalidEta>(m, "InvalidEta");
  py::register_exception<InvalidConfig>(m, "InvalidConfig");
  py::register_exception<SolverFailure>(m, "SolverFailure");

  py::class_<PolarGrid>(m, "PolarGrid")
      .def_property_readonly("r0", &PolarGrid::r0)
      .def_property_readonly("r1", &PolarGrid::R1)
      .def_property_readonly("nr", &PolarGrid::Nr)
      .def_property_readonly("ntheta", &PolarGrid::Ntheta)
      .def_property_readonly("size", &PolarGrid::size)
      .def_property_readonly("x1", [](const PolarGrid& g) { return g.x1(); })
      .def_property_readonly("x2", [](const PolarGrid& g) { return g.x2(); })
      .def("volume_weights", [](const PolarGrid& g) { return g.volume_weights(); })
      .def("boundary_nodes", [](const PolarGrid& g, const std::string& tag) {
        return g.boundary(tag_from(tag)).nodes;
      });

  m.def("build_grid", &build_grid, py::arg("r0"), py::arg("r1"), py::arg("nr"),
        py::arg("ntheta"));

  m.def("integrate_volume",
        [](const PolarGrid& g, const RVec& f) { return integrate_volume(g, f); });
  m.def("integrate_boundary", [](const PolarGrid& g, const std::string& tag, const RVec& f) {
    return integrate_boundary(g, tag_from(tag), f);
  });
  m.def("partial_derivatives", [](const PolarGrid& g, const CVec& u) {
    auto [d1, d2] = partial_derivatives(g, as_field(g, u));
    return py::make_tuple(d1.values, d2.values);
  });
  m.def("laplace_beltrami", [](const PolarGrid& g, const CVec& u, const std::string& metric) {
    return laplace_beltrami(g, as_field(g, u), metric_preset(metric)).values;
  });
  m.def("apply_P", [](const PolarGrid& g, const CVec& u, const std::string& metric,
                      const std::string& coeffs) {
    return apply_P(g, as_field(g, u), metric_preset(metric), coefficient_preset(coeffs)).values;
  });
  m.def("apply_magnetic_L",
        [](const PolarGrid& g, const CVec& u, const std::string& metric,
           const std::string& potential) {
          const MetricTables mt(g, metric_preset(metric));
          return apply_magnetic_L(g, as_field(g, u), mt, magnetic_preset(potential)).values;
        });
  m.def("magnetic_drift_reduction",
        [](const PolarGrid& g, const CVec& u, const std::string& metric,
           const std::string& potential) {
          const MetricField& mf = metric_preset(metric);
          const CoefficientSet cs = magnetic_to_drift(mf, magnetic_preset(potential));
          return apply_P(g, as_field(g, u), mf, cs).values;
        });

  m.def("metric_presets", &metric_preset_names);
  m.def("coefficient_presets", &coefficient_preset_names);
  m.def("magnetic_presets", &magnetic_preset_names);
  m.def("stokes_presets", &stokes_preset_names);
  m.def("target_presets", &target_preset_names);

  m.def("validate_weight", [](const PolarGrid& g, const std::string& weight) {
    const WeightValidation v = validate_weight(weight_preset(weight, g.r0()), g);
    py::dict d;
    d["min_psi_interior"] = v.min_psi_interior;
    d["max_abs_psi_on_S"] = v.max_abs_psi_on_S;
    d["min_grad_norm"] = v.min_grad_norm;
    d["declared_delta"] = v.declared_delta;
    d["ok"] = v.ok();
    return d;
  });

  m.def("h2_norm", [](const PolarGrid& g, const CVec& u) { return h2_norm(g, as_field(g, u)); });
  m.def("sobolev_eta_norm", [](const PolarGrid& g, const CVec& u, Real eta) {
    return sobolev_eta_norm(g, as_field(g, u), eta);
  });
  m.def("cauchy_norm", [](const PolarGrid& g, const CVec& u, const std::string& metric,
                          const std::string& coeffs) {
    const MetricTables mt(g, metric_preset(metric));
    const CoeffTables ct(g, coefficient_preset(coeffs));
    return cauchy_norm(g, as_field(g, u), mt, ct);
  });

  m.def("carleman_ratio",
        [](const PolarGrid& g, const CVec& u, const std::string& metric,
           const std::string& coeffs, const std::string& weight, Real gamma, Real s) {
          const MetricTables mt(g, metric_preset(metric));
          const CoeffTables ct(g, coefficient_preset(coeffs));
          const BaseWeight w = weight_preset(weight, g.r0());
          const CarlemanParams p{gamma, s};
          const GridField f = as_field(g, u);
          const LogScaled lhs = carleman_lhs(g, f, mt, w, p);
          const LogScaled rhs = carleman_rhs(g, f, mt, ct, w, p);
          py::dict d;
          d["lhs_log10"] = lhs.log10_value();
          d["rhs_log10"] = rhs.log10_value();
          d["ratio"] = rhs.ratio_to(lhs);
          return d;
        });

  m.def("phi_modulus", &phi_modulus, py::arg("eta"), py::arg("c"), py::arg("r"));
  m.def("minimize_over_s", [](Real C, Real M, Real c, Real eta) {
    const MinimizeResult r = minimize_over_s(C, M, c, eta);
    return py::make_tuple(r.s_opt, r.value);
  });

  m.def("make_cauchy_data",
        [](const PolarGrid& g, const std::string& target, Real delta, std::uint64_t seed,
           const std::string& metric) {
          const MetricTables mt(g, metric_preset(metric));
          const CauchyData d = make_cauchy_data(g, target_preset(target), mt, delta, seed);
          return py::make_tuple(d.f, d.h);
        },
        py::arg("grid"), py::arg("target"), py::arg("delta") = 0.0, py::arg("seed") = 42,
        py::arg("metric") = "identity");
  m.def("solve_cauchy",
        [](const PolarGrid& g, const CVec& f, const CVec& h, Real eps, const std::string& metric,
           const std::string& coeffs) {
          const MetricTables mt(g, metric_preset(metric));
          const CoeffTables ct(g, coefficient_preset(coeffs));
          CauchyData d;
          d.f = f;
          d.h = h;
          return solve_cauchy(g, d, mt, ct, eps).values;
        },
        py::arg("grid"), py::arg("f"), py::arg("h"), py::arg("eps"),
        py::arg("metric") = "identity", py::arg("coeffs") = "free");

  m.def("stokes_state", [](const PolarGrid& g, const std::string& name) {
    const StokesState s = stokes_preset(name).on_grid(g);
    return py::make_tuple(s.u1.values, s.u2.values, s.p.values);
  });
  m.def("stokes_residual_max", [](const PolarGrid& g, const std::string& name) {
    const ManufacturedStokes& ms = stokes_preset(name);
    const StokesResidual r = stokes_residual(g, ms.on_grid(g), ms.drift);
    Real mom = 0, divv = 0;
    for (int k : interior_nodes(g)) {
      mom = std::max(mom, std::max(std::abs(r.momentum1.values[k]),
                                   std::abs(r.momentum2.values[k])));
      divv = std::max(divv, std::abs(r.divergence.values[k]));
    }
    return py::make_tuple(mom, divv);
  });
  m.def("stokes_cauchy_norm", [](const PolarGrid& g, const std::string& name) {
    return stokes_cauchy_norm(g, stokes_preset(name).on_grid(g));
  });

  m.def("run_config", [](const std::string& text, const std::string& kind) {
    const ExperimentConfig cfg = parse_config_text(text, kind_from_name(kind));
    const ExperimentReport rep = run_experiment(cfg);
    py::dict d;
    d["pass"] = rep.pass;
    d["json"] = report_to_json(rep);
    return d;
  });

  m.attr("__version__") = kArtifactVersion;
}
