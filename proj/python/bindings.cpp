#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "swingsim/equilibria.hpp"
#include "swingsim/integrator.hpp"
#include "swingsim/lyapunov.hpp"
#include "swingsim/models.hpp"
#include "swingsim/scenario.hpp"

namespace py = pybind11;
using namespace swingsim;

PYBIND11_MODULE(_swingsim, m) {
  m.doc() = "Swing-equation models, equilibria, energy functions and "
            "fixed-step simulation";

  py::register_exception<SingularState>(m, "SingularStateError");
  py::register_exception<NoEquilibrium>(m, "NoEquilibriumError");
  py::register_exception<ShapeMismatch>(m, "ShapeMismatchError");
  py::register_exception<ConditionViolated>(m, "ConditionViolatedError");
  py::register_exception<InvalidConfig>(m, "InvalidConfigError");
  py::register_exception<InvalidParams>(m, "InvalidParamsError");

  m.attr("SPEED_FLOOR") = kSpeedFloor;

  py::class_<GeneratorParams>(m, "GeneratorParams")
      .def_static("from_inertia", &GeneratorParams::from_inertia,
                  py::arg("J"), py::arg("D_d"), py::arg("omega_star"))
      .def_static("from_momentum", &GeneratorParams::from_momentum,
                  py::arg("M"), py::arg("A"), py::arg("omega_star"))
      .def("with_power", &GeneratorParams::with_power, py::arg("P_m"),
           py::arg("P_e"))
      .def("with_mech_power", &GeneratorParams::with_mech_power,
           py::arg("P_m"))
      .def("with_viscous_loss", &GeneratorParams::with_viscous_loss,
           py::arg("D_m"))
      .def("with_coupling", &GeneratorParams::with_coupling, py::arg("gamma"))
      .def_property_readonly("J", &GeneratorParams::inertia)
      .def_property_readonly("D_d", &GeneratorParams::damping)
      .def_property_readonly("D_m", &GeneratorParams::viscous_loss)
      .def_property_readonly("omega_star", &GeneratorParams::omega_star)
      .def_property_readonly("P_m", &GeneratorParams::p_mech)
      .def_property_readonly("P_e", &GeneratorParams::p_load)
      .def_property_readonly("gamma", &GeneratorParams::coupling)
      .def_property_readonly("M", &GeneratorParams::momentum)
      .def_property_readonly("A", &GeneratorParams::damping_coeff);

  py::class_<SimState>(m, "SimState")
      .def(py::init([](double omega, std::optional<double> delta,
                       std::optional<double> xi) {
             SimState s;
             s.omega = omega;
             s.delta = delta;
             s.xi = xi;
             return s;
           }),
           py::arg("omega"), py::arg("delta") = py::none(),
           py::arg("xi") = py::none())
      .def_readwrite("omega", &SimState::omega)
      .def_readwrite("delta", &SimState::delta)
      .def_readwrite("xi", &SimState::xi)
      .def("__repr__", [](const SimState& s) {
        std::string r = "SimState(omega=" + std::to_string(s.omega);
        if (s.delta) r += ", delta=" + std::to_string(*s.delta);
        if (s.xi) r += ", xi=" + std::to_string(*s.xi);
        return r + ")";
      });

  py::enum_<ModelKind>(m, "ModelKind")
      .value("CONVENTIONAL_LOAD", ModelKind::ConventionalLoad)
      .value("IMPROVED_LOAD", ModelKind::ImprovedLoad)
      .value("IMPROVED_LOAD_WITH_LOSSES", ModelKind::ImprovedLoadWithLosses)
      .value("IMPROVED_CLOSED_LOOP", ModelKind::ImprovedClosedLoop)
      .value("SMIB_IMPROVED", ModelKind::SmibImproved)
      .value("SMIB_CONVENTIONAL", ModelKind::SmibConventional);

  py::class_<StateDeriv>(m, "StateDeriv")
      .def_readonly("domega", &StateDeriv::domega)
      .def_readonly("ddelta", &StateDeriv::ddelta)
      .def_readonly("dxi", &StateDeriv::dxi)
      .def("norm", &StateDeriv::norm);

  m.def("rhs", &rhs, py::arg("model"), py::arg("params"), py::arg("state"));
  m.def("rhs_conventional_load", &rhs_conventional_load);
  m.def("rhs_improved_load", &rhs_improved_load);
  m.def("rhs_improved_losses", &rhs_improved_losses);
  m.def("rhs_closed_loop", &rhs_closed_loop);
  m.def("rhs_smib_improved", &rhs_smib_improved);
  m.def("rhs_smib_conventional", &rhs_smib_conventional);
  m.def("torque_from_power", &torque_from_power, py::arg("power"),
        py::arg("omega"));
  m.def("power_from_torque", &power_from_torque, py::arg("torque"),
        py::arg("omega"));

  py::class_<EquilibriumPair>(m, "EquilibriumPair")
      .def_readonly("discriminant", &EquilibriumPair::discriminant)
      .def_readonly("omega_stable", &EquilibriumPair::omega_stable)
      .def_readonly("omega_unstable", &EquilibriumPair::omega_unstable)
      .def_readonly("exists", &EquilibriumPair::exists);

  py::class_<SmibEquilibrium>(m, "SmibEquilibrium")
      .def_readonly("delta_bar", &SmibEquilibrium::delta_bar)
      .def_readonly("omega", &SmibEquilibrium::omega)
      .def_readonly("roa_eligible", &SmibEquilibrium::roa_eligible);

  m.def("discriminant", &discriminant, py::arg("params"),
        py::arg("u_bar") = 0.0);
  m.def("load_equilibria", &load_equilibria, py::arg("params"),
        py::arg("u_bar") = 0.0);
  m.def("smib_equilibrium", &smib_equilibrium);
  m.def("reduce_losses", &reduce_losses);

  m.def("v_load", &v_load, py::arg("params"), py::arg("omega"),
        py::arg("u_bar") = 0.0);
  m.def("vdot_load", &vdot_load, py::arg("params"), py::arg("omega"),
        py::arg("u_bar") = 0.0);
  m.def("w_storage", &w_storage, py::arg("params"), py::arg("omega"),
        py::arg("omega_s"));
  m.def("u_closed_loop", &u_closed_loop);
  m.def("u_closed_loop_rate", &u_closed_loop_rate);
  m.def("v_smib", &v_smib, py::arg("params"), py::arg("state"),
        py::arg("model"));
  m.def("vdot_smib_improved", &vdot_smib_improved);
  m.def("vdot_smib_conventional", &vdot_smib_conventional);

  py::class_<SmibConstants>(m, "SmibConstants")
      .def_readonly("c_k", &SmibConstants::c_k)
      .def_readonly("c_p", &SmibConstants::c_p)
      .def_readonly("c", &SmibConstants::c)
      .def_readonly("delta_bar", &SmibConstants::delta_bar)
      .def_readonly("delta_minus", &SmibConstants::delta_minus);
  m.def("smib_constants", &smib_constants);

  py::enum_<RoaKind>(m, "RoaKind")
      .value("OMEGA_S", RoaKind::OmegaS)
      .value("OMEGA_K", RoaKind::OmegaK)
      .value("OVAL_O", RoaKind::OvalO)
      .value("SMIB_LEVEL_SET", RoaKind::SmibLevelSet)
      .value("SMIB_CONVENTIONAL_LEVEL_SET",
             RoaKind::SmibConventionalLevelSet);

  py::class_<RoaSet>(m, "RoaSet")
      .def_readonly("kind", &RoaSet::kind)
      .def_readonly("level", &RoaSet::level)
      .def_readonly("omega_stable", &RoaSet::omega_stable)
      .def_readonly("omega_unstable", &RoaSet::omega_unstable)
      .def_readonly("xi_bar", &RoaSet::xi_bar)
      .def_readonly("delta_bar", &RoaSet::delta_bar)
      .def_readonly("delta_minus", &RoaSet::delta_minus)
      .def_readonly("c_k", &RoaSet::c_k)
      .def_readonly("c_p", &RoaSet::c_p);

  m.def("make_roa_set", &make_roa_set, py::arg("kind"), py::arg("params"),
        py::arg("u_bar") = 0.0);
  m.def("roa_contains", &roa_contains);
  m.def("is_exceptional", &is_exceptional);
  m.def("roa_energy", &roa_energy);
  m.def("roa_energy_rate", &roa_energy_rate);

  py::class_<IntegrationConfig>(m, "IntegrationConfig")
      .def(py::init<>())
      .def_readwrite("dt", &IntegrationConfig::dt)
      .def_readwrite("t_max", &IntegrationConfig::t_max)
      .def_readwrite("conv_tol", &IntegrationConfig::conv_tol)
      .def_readwrite("div_bound", &IntegrationConfig::div_bound)
      .def_readwrite("lyap_kind", &IntegrationConfig::lyap_kind)
      .def_readwrite("record_stride", &IntegrationConfig::record_stride);

  py::enum_<Verdict>(m, "Verdict")
      .value("CONVERGED", Verdict::Converged)
      .value("DIVERGED", Verdict::Diverged)
      .value("HIT_SINGULARITY", Verdict::HitSingularity)
      .value("MAX_TIME", Verdict::MaxTime);

  py::class_<TrajectorySample>(m, "TrajectorySample")
      .def_readonly("t", &TrajectorySample::t)
      .def_readonly("state", &TrajectorySample::state)
      .def_readonly("energy", &TrajectorySample::energy)
      .def_readonly("energy_rate", &TrajectorySample::energy_rate);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("samples", &Trajectory::samples)
      .def_readonly("verdict", &Trajectory::verdict)
      .def_readonly("t_end", &Trajectory::t_end)
      .def_readonly("final_state", &Trajectory::final_state)
      .def_readonly("singular_time", &Trajectory::singular_time);

  m.def("integrate", &integrate, py::arg("model"), py::arg("params"),
        py::arg("initial"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<LevelSetPolyline>(m, "LevelSetPolyline")
      .def_readonly("columns", &LevelSetPolyline::columns)
      .def_readonly("points", &LevelSetPolyline::points)
      .def_readonly("one_dimensional", &LevelSetPolyline::one_dimensional);
  m.def("level_set_sample", &level_set_sample, py::arg("set"),
        py::arg("resolution"));
}
