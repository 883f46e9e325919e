#pragma once

#include "swingsim/params.hpp"

namespace swingsim {

/// Evaluating any omega-dividing right-hand side at or below this speed is an
/// error, not a clamp, so misuse is loud.
inline constexpr double kSpeedFloor = 1e-6;  // rad/s

enum class ModelKind {
  ConventionalLoad,        // M w' + A (w - w*) = P_m - P_e
  ImprovedLoad,            // J w w' + D_d w (w - w*) = P_m - P_e
  ImprovedLoadWithLosses,  // adds the viscous term D_m w^2
  ImprovedClosedLoop,      // improved load + integral controller state xi
  SmibImproved,            // improved machine against an infinite bus
  SmibConventional,        // conventional machine against an infinite bus
};

/// State derivative mirroring SimState's shape.
struct StateDeriv {
  double domega = 0.0;            // rad/s^2
  std::optional<double> ddelta;   // rad/s
  std::optional<double> dxi;      // 1/s (per-unit power rate)

  double norm() const;
};

bool model_is_singular(ModelKind kind);   // divides by omega
bool model_has_delta(ModelKind kind);
bool model_has_xi(ModelKind kind);
const char* model_name(ModelKind kind);

// Single-machine constant-load right-hand sides, rad/s^2.
double rhs_conventional_load(const GeneratorParams& p, const SimState& s);
double rhs_improved_load(const GeneratorParams& p, const SimState& s);
double rhs_improved_losses(const GeneratorParams& p, const SimState& s);

// Closed loop: omega dynamics driven by u = -xi plus the controller
// integration xi' = (omega - omega*)/omega.
StateDeriv rhs_closed_loop(const GeneratorParams& p, const SimState& s);

// Infinite-bus variants: delta' = omega - omega*, electrical power
// gamma*sin(delta).
StateDeriv rhs_smib_improved(const GeneratorParams& p, const SimState& s);
StateDeriv rhs_smib_conventional(const GeneratorParams& p, const SimState& s);

/// Dispatch on kind with strict shape checking.
StateDeriv rhs(ModelKind kind, const GeneratorParams& p, const SimState& s);

/// tau = P/omega. Throws SingularState at or below the speed floor.
double torque_from_power(double power, double omega);
double power_from_torque(double torque, double omega);

}  // namespace swingsim
