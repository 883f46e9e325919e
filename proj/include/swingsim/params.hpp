#pragma once

#include <optional>

#include "swingsim/errors.hpp"

namespace swingsim {

/// Physical constants of one machine/scenario. Immutable after construction;
/// use the factories and the with_* copies to build variants.
///
/// Powers are dimensionless per-unit values. Speeds are rad/s throughout;
/// Hz only ever appears at I/O boundaries.
class GeneratorParams {
 public:
  /// Unit machine (J = D_d = omega_star = 1); a well-formed placeholder.
  GeneratorParams() = default;

  /// Build from the rotor-side constants: J (kg m^2) and the damping-torque
  /// coefficient D_d (N m s).
  static GeneratorParams from_inertia(double inertia, double damping,
                                      double omega_star);

  /// Build from the angular momentum M = J*omega_star and the speed-damping
  /// coefficient A = D_d*omega_star, the form most scenario tables use.
  static GeneratorParams from_momentum(double momentum, double damping_coeff,
                                       double omega_star);

  GeneratorParams with_power(double p_mech, double p_load) const;
  GeneratorParams with_mech_power(double p_mech) const;
  GeneratorParams with_viscous_loss(double viscous) const;
  GeneratorParams with_coupling(double coupling) const;

  double inertia() const { return inertia_; }        // J
  double damping() const { return damping_; }        // D_d
  double viscous_loss() const { return viscous_; }   // D_m, 0 unless set
  double omega_star() const { return omega_star_; }  // nominal speed
  double p_mech() const { return p_mech_; }          // P_m
  double p_load() const { return p_load_; }          // P_e
  std::optional<double> coupling() const { return coupling_; }  // gamma
  double coupling_or_throw() const;

  /// M = J*omega_star, exact with respect to the construction route.
  double momentum() const { return momentum_; }
  /// A = D_d*omega_star, exact with respect to the construction route.
  double damping_coeff() const { return damping_coeff_; }

 private:
  void validate() const;

  double inertia_ = 1.0;
  double damping_ = 1.0;
  double viscous_ = 0.0;
  double omega_star_ = 1.0;
  double p_mech_ = 0.0;
  double p_load_ = 0.0;
  std::optional<double> coupling_;
  double momentum_ = 1.0;
  double damping_coeff_ = 1.0;
};

/// Dynamical state. delta is present only for infinite-bus variants, xi only
/// for the closed loop; the model dispatch enforces the shape.
struct SimState {
  double omega = 0.0;               // rotor speed, rad/s
  std::optional<double> delta;      // angle relative to the infinite bus, rad
  std::optional<double> xi;         // integral-controller state, per-unit power
};

}  // namespace swingsim
