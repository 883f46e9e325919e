#pragma once

#include <limits>

#include "swingsim/equilibria.hpp"
#include "swingsim/models.hpp"
#include "swingsim/params.hpp"

namespace swingsim {

// ---- Energy / storage functions -------------------------------------------

/// V(w) = 1/2 J (w - omega_stable)^2 for the improved load model.
/// Throws NoEquilibrium when the equilibria do not exist.
double v_load(const GeneratorParams& p, double omega, double u_bar = 0.0);

/// Closed form of dV/dt along the improved load model:
/// -D_d (w - ws)^2 (1 - wu/w).
double vdot_load(const GeneratorParams& p, double omega, double u_bar = 0.0);

/// Incremental storage W(w) = 1/2 J (w - omega_s)^2 * (omega_star/omega_s)
/// for a supplied steady state omega_s (> 0).
double w_storage(const GeneratorParams& p, double omega, double omega_s);

/// U(xi, w) = 1/2 (xi - xi_bar)^2 + 1/2 J (w - omega_star)^2 with
/// xi_bar = P_m - P_e. Requires xi in the state.
double u_closed_loop(const GeneratorParams& p, const SimState& s);

/// dU/dt along the closed loop: -D_d (w - omega_star)^2.
double u_closed_loop_rate(const GeneratorParams& p, const SimState& s);

/// Kinetic plus potential energy of the infinite-bus machine. kind selects
/// the improved (J, gamma/omega_star) or conventional (M, gamma) weighting;
/// anything else is a ShapeMismatch.
double v_smib(const GeneratorParams& p, const SimState& s, ModelKind kind);

/// Closed form of dV/dt along the improved infinite-bus model.
double vdot_smib_improved(const GeneratorParams& p, const SimState& s);

/// dV/dt along the conventional infinite-bus model: -A (w - omega_star)^2.
double vdot_smib_conventional(const GeneratorParams& p, const SimState& s);

// ---- Region-of-attraction level sets ---------------------------------------

enum class RoaKind {
  OmegaS,                    // load model, V <= 1/2 J discriminant
  OmegaK,                    // storage variant, W <= level
  OvalO,                     // closed loop, U <= 1/2 J omega_star^2
  SmibLevelSet,              // V <= min(c_k, c_p)
  SmibConventionalLevelSet,  // V <= c_p (conventional weighting)
};

const char* roa_kind_name(RoaKind kind);

/// Level-set constants of the improved infinite-bus estimate.
struct SmibConstants {
  double c_k = 0.0;
  double c_p = 0.0;
  double c = 0.0;          // min(c_k, c_p)
  double delta_bar = 0.0;
  /// Lower end of the angle interval on which the potential stays below c_p;
  /// the matching upper end is +pi/2.
  double delta_minus = 0.0;
};

/// Throws ConditionViolated naming the failed inequality when
/// omega_star <= sqrt(gamma/D_d) or P_m/gamma is outside [0, 2/pi).
SmibConstants smib_constants(const GeneratorParams& p);

/// Immutable snapshot of one level set; anchors not used by a kind stay NaN.
struct RoaSet {
  RoaKind kind = RoaKind::OmegaS;
  double level = 0.0;
  GeneratorParams params;

  double omega_stable = std::numeric_limits<double>::quiet_NaN();
  double omega_unstable = std::numeric_limits<double>::quiet_NaN();
  double xi_bar = std::numeric_limits<double>::quiet_NaN();
  double delta_bar = std::numeric_limits<double>::quiet_NaN();
  double delta_minus = std::numeric_limits<double>::quiet_NaN();
  double c_k = std::numeric_limits<double>::quiet_NaN();
  double c_p = std::numeric_limits<double>::quiet_NaN();
};

/// Builds the requested set from the scenario parameters. u_bar shifts the
/// load equilibria for OmegaS/OmegaK. Throws NoEquilibrium or
/// ConditionViolated when the set is not defined.
RoaSet make_roa_set(RoaKind kind, const GeneratorParams& p, double u_bar = 0.0);

/// Level-set membership, boundary included. Domain restrictions apply
/// (omega > 0 for the load sets, delta in [-pi, pi] for the infinite-bus
/// sets). Throws ShapeMismatch when the state shape does not fit the kind.
bool roa_contains(const RoaSet& set, const SimState& s);

/// The isolated initial conditions excluded from the convergence guarantee:
/// omega = omega_unstable for the load sets and (xi_bar, 0) for the oval.
bool is_exceptional(const RoaSet& set, const SimState& s);

/// Energy value / rate used when instrumenting trajectories with a set kind.
double roa_energy(const RoaSet& set, const SimState& s);
double roa_energy_rate(const RoaSet& set, const SimState& s);

/// The model kind whose trajectories the set describes.
ModelKind roa_model(RoaKind kind);

}  // namespace swingsim
