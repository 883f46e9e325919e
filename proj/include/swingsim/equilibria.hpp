#pragma once

#include <optional>

#include "swingsim/params.hpp"

namespace swingsim {

/// The two roots of D_d*w*(w - w*) = u + P_m - P_e, when they exist.
/// omega_stable > omega_unstable, omega_stable + omega_unstable = omega_star.
struct EquilibriumPair {
  double discriminant = 0.0;            // (rad/s)^2
  std::optional<double> omega_stable;   // rad/s
  std::optional<double> omega_unstable; // rad/s
  bool exists = false;                  // discriminant > 0, strictly
};

/// discriminant = omega_star^2 + 4*(u_bar + P_m - P_e)/D_d. A negative value
/// is a valid, reportable outcome.
double discriminant(const GeneratorParams& p, double u_bar = 0.0);

/// Closed-form equilibria of the improved load model under a constant extra
/// input u_bar. exists = false when the discriminant is not strictly positive
/// (a double root is treated as non-existent).
EquilibriumPair load_equilibria(const GeneratorParams& p, double u_bar = 0.0);

struct SmibEquilibrium {
  double delta_bar = 0.0;   // arcsin(P_m/gamma), principal branch
  double omega = 0.0;       // always omega_star
  /// True when 0 < P_m/gamma < 2/pi, the window in which the level-set
  /// region-of-attraction estimate applies.
  bool roa_eligible = false;
};

/// Throws NoEquilibrium when |P_m/gamma| > 1.
SmibEquilibrium smib_equilibrium(const GeneratorParams& p);

/// Folds the viscous mechanical loss into the damper coefficient:
/// D = D_m + D_d and a shifted nominal speed D_d*omega_star/(D_m + D_d).
/// Idempotent; identity when there is no viscous loss.
GeneratorParams reduce_losses(const GeneratorParams& p);

}  // namespace swingsim
