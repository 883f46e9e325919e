#include "swingsim/models.hpp"

#include <cmath>
#include <string>

namespace swingsim {

namespace {

void require_speed(double omega) {
  if (!(omega > kSpeedFloor))
    throw SingularState("rotor speed " + std::to_string(omega) +
                        " rad/s is at or below the evaluation floor");
}

void require_shape(ModelKind kind, const SimState& s) {
  const bool want_delta = model_has_delta(kind);
  const bool want_xi = model_has_xi(kind);
  if (want_delta != s.delta.has_value() || want_xi != s.xi.has_value())
    throw ShapeMismatch(std::string("state shape does not match model ") +
                        model_name(kind));
}

}  // namespace

double StateDeriv::norm() const {
  double sq = domega * domega;
  if (ddelta) sq += *ddelta * *ddelta;
  if (dxi) sq += *dxi * *dxi;
  return std::sqrt(sq);
}

bool model_is_singular(ModelKind kind) {
  return kind != ModelKind::ConventionalLoad &&
         kind != ModelKind::SmibConventional;
}

bool model_has_delta(ModelKind kind) {
  return kind == ModelKind::SmibImproved || kind == ModelKind::SmibConventional;
}

bool model_has_xi(ModelKind kind) {
  return kind == ModelKind::ImprovedClosedLoop;
}

const char* model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::ConventionalLoad: return "conventional-load";
    case ModelKind::ImprovedLoad: return "improved-load";
    case ModelKind::ImprovedLoadWithLosses: return "improved-load-losses";
    case ModelKind::ImprovedClosedLoop: return "closed-loop";
    case ModelKind::SmibImproved: return "smib-improved";
    case ModelKind::SmibConventional: return "smib-conventional";
  }
  return "unknown";
}

double rhs_conventional_load(const GeneratorParams& p, const SimState& s) {
  return (p.p_mech() - p.p_load() -
          p.damping_coeff() * (s.omega - p.omega_star())) /
         p.momentum();
}

double rhs_improved_load(const GeneratorParams& p, const SimState& s) {
  require_speed(s.omega);
  return (-p.damping() * (s.omega - p.omega_star()) +
          (p.p_mech() - p.p_load()) / s.omega) /
         p.inertia();
}

double rhs_improved_losses(const GeneratorParams& p, const SimState& s) {
  require_speed(s.omega);
  return (-p.viscous_loss() * s.omega -
          p.damping() * (s.omega - p.omega_star()) +
          (p.p_mech() - p.p_load()) / s.omega) /
         p.inertia();
}

StateDeriv rhs_closed_loop(const GeneratorParams& p, const SimState& s) {
  require_speed(s.omega);
  if (!s.xi) throw ShapeMismatch("closed loop needs the controller state xi");
  StateDeriv d;
  d.domega = (-p.damping() * (s.omega - p.omega_star()) +
              (-*s.xi + p.p_mech() - p.p_load()) / s.omega) /
             p.inertia();
  d.dxi = (s.omega - p.omega_star()) / s.omega;
  return d;
}

StateDeriv rhs_smib_improved(const GeneratorParams& p, const SimState& s) {
  require_speed(s.omega);
  if (!s.delta) throw ShapeMismatch("infinite-bus model needs delta");
  StateDeriv d;
  d.ddelta = s.omega - p.omega_star();
  d.domega = (-p.damping() * (s.omega - p.omega_star()) +
              (p.p_mech() - p.coupling_or_throw() * std::sin(*s.delta)) /
                  s.omega) /
             p.inertia();
  return d;
}

StateDeriv rhs_smib_conventional(const GeneratorParams& p, const SimState& s) {
  if (!s.delta) throw ShapeMismatch("infinite-bus model needs delta");
  StateDeriv d;
  d.ddelta = s.omega - p.omega_star();
  d.domega = (p.p_mech() - p.coupling_or_throw() * std::sin(*s.delta) -
              p.damping_coeff() * (s.omega - p.omega_star())) /
             p.momentum();
  return d;
}

StateDeriv rhs(ModelKind kind, const GeneratorParams& p, const SimState& s) {
  require_shape(kind, s);
  StateDeriv d;
  switch (kind) {
    case ModelKind::ConventionalLoad:
      d.domega = rhs_conventional_load(p, s);
      break;
    case ModelKind::ImprovedLoad:
      d.domega = rhs_improved_load(p, s);
      break;
    case ModelKind::ImprovedLoadWithLosses:
      d.domega = rhs_improved_losses(p, s);
      break;
    case ModelKind::ImprovedClosedLoop:
      return rhs_closed_loop(p, s);
    case ModelKind::SmibImproved:
      return rhs_smib_improved(p, s);
    case ModelKind::SmibConventional:
      return rhs_smib_conventional(p, s);
  }
  return d;
}

double torque_from_power(double power, double omega) {
  require_speed(omega);
  return power / omega;
}

double power_from_torque(double torque, double omega) {
  require_speed(omega);
  return torque * omega;
}

}  // namespace swingsim
