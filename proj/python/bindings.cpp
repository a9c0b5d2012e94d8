#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "equiheat/errors.hpp"
#include "equiheat/experiments.hpp"
#include "equiheat/heat.hpp"
#include "equiheat/oscillatory.hpp"
#include "equiheat/selberg.hpp"
#include "equiheat/symplectic.hpp"
#include "equiheat/traces.hpp"

namespace py = pybind11;
using namespace equiheat;

PYBIND11_MODULE(_core, m) {
  m.doc() = "equivariant heat-trace laboratory (C++ core)";

  py::register_exception<DomainError>(m, "DomainError");
  py::register_exception<TruncationError>(m, "TruncationError");
  py::register_exception<NumericError>(m, "NumericError");
  py::register_exception<ValidationError>(m, "ValidationError");

  py::class_<GroupElement>(m, "GroupElement")
      .def(py::init<>())
      .def_readwrite("data", &GroupElement::data);

  py::class_<IrrepInfo>(m, "IrrepInfo")
      .def_readonly("label", &IrrepInfo::label)
      .def_readonly("dimension", &IrrepInfo::dimension)
      .def_readonly("casimir", &IrrepInfo::casimir);

  py::class_<GroupModel>(m, "GroupModel")
      .def_static("make", &GroupModel::make)
      .def_property_readonly("name", &GroupModel::name)
      .def_property_readonly("dim", &GroupModel::dim)
      .def_property_readonly("injectivity_radius", &GroupModel::injectivity_radius)
      .def_property_readonly("riemannian_volume", &GroupModel::riemannian_volume)
      .def("identity", &GroupModel::identity)
      .def("multiply", &GroupModel::multiply)
      .def("inverse", &GroupModel::inverse)
      .def("exp", &GroupModel::exp)
      .def("log", &GroupModel::log)
      .def("distance", py::overload_cast<const GroupElement&>(&GroupModel::distance, py::const_))
      .def("irreps", &GroupModel::irreps)
      .def("character", &GroupModel::character)
      .def("haar_integrate", &GroupModel::haar_integrate, py::arg("f"), py::arg("bandwidth") = 32);

  m.def("heat_kernel_eval",
        [](const GroupModel& g, double t, const GroupElement& e) {
          return heat_kernel_eval(g, t, e);
        });
  m.def("heat_density_eval", [](const GroupModel& g, double t, const GroupElement& e) {
    return heat_density_eval(g, t, e);
  });

  py::class_<SigmaLabel>(m, "SigmaLabel").def(py::init([](std::vector<int> v) {
    SigmaLabel s;
    s.v = std::move(v);
    return s;
  }));

  py::class_<SpaceModel>(m, "SpaceModel")
      .def_static("make", &SpaceModel::make)
      .def_property_readonly("name", &SpaceModel::name)
      .def_property_readonly("dim", &SpaceModel::dim)
      .def("spectral_trace",
           [](const SpaceModel& s, const SigmaLabel& sig, double t) {
             return s.spectral_trace(sig, t);
           })
      .def("riemannian_volume", &SpaceModel::riemannian_volume);

  py::class_<PowerLawFit>(m, "PowerLawFit")
      .def_readonly("alpha", &PowerLawFit::alpha)
      .def_readonly("coefficient", &PowerLawFit::coefficient)
      .def_readonly("alpha_sigma", &PowerLawFit::alpha_sigma)
      .def_readonly("coefficient_sigma", &PowerLawFit::coefficient_sigma);

  py::class_<TraceCurve>(m, "TraceCurve")
      .def_readonly("t", &TraceCurve::t)
      .def_readonly("value", &TraceCurve::value)
      .def_readonly("bound", &TraceCurve::bound);

  m.def("dyadic_grid", &dyadic_grid);
  m.def("spectral_trace_curve", &spectral_trace_curve);
  m.def("fit_small_time", &fit_small_time, py::arg("curve"), py::arg("with_log_factor") = false);

  py::class_<CriticalGeometry>(m, "CriticalGeometry")
      .def_readonly("kappa", &CriticalGeometry::kappa)
      .def_readonly("lambda_chain", &CriticalGeometry::lambda_chain)
      .def_readonly("principal_isotropy", &CriticalGeometry::principal_isotropy)
      .def_readonly("vol_estimate", &CriticalGeometry::vol_estimate)
      .def_readonly("vol_error", &CriticalGeometry::vol_error);

  m.def("analyze_geometry",
        [](const SpaceModel& s, int budget, std::uint64_t seed) {
          return analyze_geometry(s, budget, seed);
        },
        py::arg("space"), py::arg("budget") = 4096, py::arg("seed") = 7);

  py::class_<SelbergReport>(m, "SelbergReport")
      .def_readonly("spectral", &SelbergReport::spectral)
      .def_readonly("geometric", &SelbergReport::geometric)
      .def_readonly("residual", &SelbergReport::residual);

  py::class_<FiniteLattice>(m, "FiniteLattice")
      .def_readonly("name", &FiniteLattice::name)
      .def_readonly("order", &FiniteLattice::order);

  m.def("make_cyclic_lattice", &make_cyclic_lattice);
  m.def("selberg_sides",
        [](const GroupModel& g, const FiniteLattice& l, double t) {
          return selberg_sides(g, l, t);
        });
  m.def("bundle_heat_trace_spectral", [](int charge, double t) {
    return bundle_heat_trace_spectral(charge, t);
  });
  m.def("bundle_heat_trace_kernel", [](const GroupModel& g, int charge, double t) {
    return bundle_heat_trace_kernel(g, charge, t);
  });

  m.def("run_experiment_json", [](const std::string& config_text) {
    ExperimentConfig cfg = ExperimentConfig::parse_string(config_text);
    ExperimentReport rep = run_experiment(cfg);
    return report_to_json(rep, false);
  });
}
