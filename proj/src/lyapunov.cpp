#include "swingsim/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "swingsim/errors.hpp"

namespace swingsim {

namespace {

constexpr double kPi = std::numbers::pi;

void require_speed(double omega) {
  if (!(omega > kSpeedFloor))
    throw SingularState("rotor speed " + std::to_string(omega) +
                        " rad/s is at or below the evaluation floor");
}

EquilibriumPair existing_pair(const GeneratorParams& p, double u_bar) {
  EquilibriumPair pair = load_equilibria(p, u_bar);
  if (!pair.exists)
    throw NoEquilibrium("no steady state: discriminant = " +
                        std::to_string(pair.discriminant));
  return pair;
}

// Dimensionless washboard potential shared by both infinite-bus weightings:
// -cos(delta) + cos(delta_bar) - (delta - delta_bar) sin(delta_bar).
double potential_shape(double delta, double delta_bar) {
  return -std::cos(delta) + std::cos(delta_bar) -
         (delta - delta_bar) * std::sin(delta_bar);
}

// Unique root of potential_shape == its value at +pi/2, left of delta_bar.
// The potential decreases monotonically from -pi to delta_bar when
// delta_bar >= 0, so plain bisection suffices.
double potential_lower_crossing(double delta_bar) {
  const double target = potential_shape(0.5 * kPi, delta_bar);
  double lo = -kPi;
  double hi = delta_bar;
  for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (potential_shape(mid, delta_bar) > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

void require_load_shape(const SimState& s) {
  if (s.delta || s.xi)
    throw ShapeMismatch("load-model set expects a speed-only state");
}

}  // namespace

double v_load(const GeneratorParams& p, double omega, double u_bar) {
  const EquilibriumPair pair = existing_pair(p, u_bar);
  const double dev = omega - *pair.omega_stable;
  return 0.5 * p.inertia() * dev * dev;
}

double vdot_load(const GeneratorParams& p, double omega, double u_bar) {
  require_speed(omega);
  const EquilibriumPair pair = existing_pair(p, u_bar);
  const double dev = omega - *pair.omega_stable;
  return -p.damping() * dev * dev * (1.0 - *pair.omega_unstable / omega);
}

double w_storage(const GeneratorParams& p, double omega, double omega_s) {
  if (!(omega_s > 0.0))
    throw NoEquilibrium("storage needs a positive steady state");
  const double dev = omega - omega_s;
  return 0.5 * p.inertia() * dev * dev * (p.omega_star() / omega_s);
}

double u_closed_loop(const GeneratorParams& p, const SimState& s) {
  if (!s.xi) throw ShapeMismatch("closed-loop energy needs xi");
  const double dxi = *s.xi - (p.p_mech() - p.p_load());
  const double dw = s.omega - p.omega_star();
  return 0.5 * dxi * dxi + 0.5 * p.inertia() * dw * dw;
}

double u_closed_loop_rate(const GeneratorParams& p, const SimState& s) {
  if (!s.xi) throw ShapeMismatch("closed-loop energy needs xi");
  const double dw = s.omega - p.omega_star();
  return -p.damping() * dw * dw;
}

double v_smib(const GeneratorParams& p, const SimState& s, ModelKind kind) {
  if (!s.delta) throw ShapeMismatch("infinite-bus energy needs delta");
  const SmibEquilibrium eq = smib_equilibrium(p);
  const double gamma = p.coupling_or_throw();
  const double shape = potential_shape(*s.delta, eq.delta_bar);
  const double dw = s.omega - p.omega_star();
  switch (kind) {
    case ModelKind::SmibImproved:
      return 0.5 * p.inertia() * dw * dw +
             gamma / p.omega_star() * shape;
    case ModelKind::SmibConventional:
      return 0.5 * p.momentum() * dw * dw + gamma * shape;
    default:
      throw ShapeMismatch("energy is defined for the infinite-bus models");
  }
}

double vdot_smib_improved(const GeneratorParams& p, const SimState& s) {
  require_speed(s.omega);
  if (!s.delta) throw ShapeMismatch("infinite-bus energy needs delta");
  const SmibEquilibrium eq = smib_equilibrium(p);
  const double gamma = p.coupling_or_throw();
  const double dw = s.omega - p.omega_star();
  const double sin_gap = std::sin(*s.delta) - std::sin(eq.delta_bar);
  return -dw * dw *
         (p.damping() - gamma / (s.omega * p.omega_star()) * sin_gap);
}

double vdot_smib_conventional(const GeneratorParams& p, const SimState& s) {
  if (!s.delta) throw ShapeMismatch("infinite-bus energy needs delta");
  const double dw = s.omega - p.omega_star();
  return -p.damping_coeff() * dw * dw;
}

const char* roa_kind_name(RoaKind kind) {
  switch (kind) {
    case RoaKind::OmegaS: return "omega-s";
    case RoaKind::OmegaK: return "omega-k";
    case RoaKind::OvalO: return "oval";
    case RoaKind::SmibLevelSet: return "smib";
    case RoaKind::SmibConventionalLevelSet: return "smib-conventional";
  }
  return "unknown";
}

SmibConstants smib_constants(const GeneratorParams& p) {
  const double gamma = p.coupling_or_throw();
  const double ws = p.omega_star();
  if (!(ws * ws > gamma / p.damping()))
    throw ConditionViolated(
        "level-set constants require omega_star > sqrt(gamma/damping)");
  const double ratio = p.p_mech() / gamma;
  if (!(ratio >= 0.0 && ratio < 2.0 / kPi))
    throw ConditionViolated(
        "level-set constants require 0 <= P_m/gamma < 2/pi");

  SmibConstants out;
  out.delta_bar = std::asin(ratio);
  const double margin = ws - gamma / (p.damping() * ws);
  out.c_k = 0.5 * p.inertia() * margin * margin;
  out.c_p = gamma / ws * potential_shape(0.5 * kPi, out.delta_bar);
  out.c = std::min(out.c_k, out.c_p);
  out.delta_minus = potential_lower_crossing(out.delta_bar);
  return out;
}

ModelKind roa_model(RoaKind kind) {
  switch (kind) {
    case RoaKind::OmegaS:
    case RoaKind::OmegaK:
      return ModelKind::ImprovedLoad;
    case RoaKind::OvalO:
      return ModelKind::ImprovedClosedLoop;
    case RoaKind::SmibLevelSet:
      return ModelKind::SmibImproved;
    case RoaKind::SmibConventionalLevelSet:
      return ModelKind::SmibConventional;
  }
  return ModelKind::ImprovedLoad;
}

RoaSet make_roa_set(RoaKind kind, const GeneratorParams& p, double u_bar) {
  RoaSet set;
  set.kind = kind;
  set.params = p;
  switch (kind) {
    case RoaKind::OmegaS: {
      const EquilibriumPair pair = existing_pair(p, u_bar);
      set.omega_stable = *pair.omega_stable;
      set.omega_unstable = *pair.omega_unstable;
      set.level = 0.5 * p.inertia() * pair.discriminant;
      break;
    }
    case RoaKind::OmegaK: {
      const EquilibriumPair pair = existing_pair(p, u_bar);
      set.omega_stable = *pair.omega_stable;
      set.omega_unstable = *pair.omega_unstable;
      set.level = 0.5 * p.inertia() * pair.discriminant *
                  (p.omega_star() / *pair.omega_stable);
      break;
    }
    case RoaKind::OvalO: {
      set.xi_bar = p.p_mech() - p.p_load();
      set.level = 0.5 * p.inertia() * p.omega_star() * p.omega_star();
      break;
    }
    case RoaKind::SmibLevelSet: {
      const SmibConstants c = smib_constants(p);
      set.omega_stable = p.omega_star();
      set.delta_bar = c.delta_bar;
      set.delta_minus = c.delta_minus;
      set.c_k = c.c_k;
      set.c_p = c.c_p;
      set.level = c.c;
      break;
    }
    case RoaKind::SmibConventionalLevelSet: {
      const double gamma = p.coupling_or_throw();
      const double ratio = p.p_mech() / gamma;
      if (!(ratio >= 0.0 && ratio < 2.0 / kPi))
        throw ConditionViolated(
            "level-set constants require 0 <= P_m/gamma < 2/pi");
      set.omega_stable = p.omega_star();
      set.delta_bar = std::asin(ratio);
      set.delta_minus = potential_lower_crossing(set.delta_bar);
      set.c_p = gamma * potential_shape(0.5 * kPi, set.delta_bar);
      set.level = set.c_p;
      break;
    }
  }
  return set;
}

bool roa_contains(const RoaSet& set, const SimState& s) {
  switch (set.kind) {
    case RoaKind::OmegaS: {
      require_load_shape(s);
      if (!(s.omega > 0.0)) return false;
      const double dev = s.omega - set.omega_stable;
      return 0.5 * set.params.inertia() * dev * dev <= set.level;
    }
    case RoaKind::OmegaK: {
      require_load_shape(s);
      if (!(s.omega > 0.0)) return false;
      return w_storage(set.params, s.omega, set.omega_stable) <= set.level;
    }
    case RoaKind::OvalO: {
      if (!s.xi || s.delta)
        throw ShapeMismatch("oval membership expects (omega, xi)");
      return u_closed_loop(set.params, s) <= set.level;
    }
    case RoaKind::SmibLevelSet:
    case RoaKind::SmibConventionalLevelSet: {
      if (!s.delta || s.xi)
        throw ShapeMismatch("infinite-bus membership expects (delta, omega)");
      if (*s.delta < -kPi || *s.delta > kPi) return false;
      const ModelKind model = set.kind == RoaKind::SmibLevelSet
                                  ? ModelKind::SmibImproved
                                  : ModelKind::SmibConventional;
      return v_smib(set.params, s, model) <= set.level;
    }
  }
  return false;
}

bool is_exceptional(const RoaSet& set, const SimState& s) {
  const double tol = 1e-9 * set.params.omega_star();
  switch (set.kind) {
    case RoaKind::OmegaS:
    case RoaKind::OmegaK:
      return std::abs(s.omega - set.omega_unstable) <= tol;
    case RoaKind::OvalO:
      return s.xi && std::abs(s.omega) <= tol &&
             std::abs(*s.xi - set.xi_bar) <=
                 1e-9 * std::max(1.0, std::abs(set.xi_bar));
    case RoaKind::SmibLevelSet:
    case RoaKind::SmibConventionalLevelSet:
      return false;
  }
  return false;
}

double roa_energy(const RoaSet& set, const SimState& s) {
  switch (set.kind) {
    case RoaKind::OmegaS: {
      const double dev = s.omega - set.omega_stable;
      return 0.5 * set.params.inertia() * dev * dev;
    }
    case RoaKind::OmegaK:
      return w_storage(set.params, s.omega, set.omega_stable);
    case RoaKind::OvalO:
      return u_closed_loop(set.params, s);
    case RoaKind::SmibLevelSet:
      return v_smib(set.params, s, ModelKind::SmibImproved);
    case RoaKind::SmibConventionalLevelSet:
      return v_smib(set.params, s, ModelKind::SmibConventional);
  }
  return 0.0;
}

double roa_energy_rate(const RoaSet& set, const SimState& s) {
  switch (set.kind) {
    case RoaKind::OmegaS:
    case RoaKind::OmegaK: {
      require_speed(s.omega);
      const double dev = s.omega - set.omega_stable;
      double rate = -set.params.damping() * dev * dev *
                    (1.0 - set.omega_unstable / s.omega);
      if (set.kind == RoaKind::OmegaK)
        rate *= set.params.omega_star() / set.omega_stable;
      return rate;
    }
    case RoaKind::OvalO:
      return u_closed_loop_rate(set.params, s);
    case RoaKind::SmibLevelSet:
      return vdot_smib_improved(set.params, s);
    case RoaKind::SmibConventionalLevelSet:
      return vdot_smib_conventional(set.params, s);
  }
  return 0.0;
}

}  // namespace swingsim
