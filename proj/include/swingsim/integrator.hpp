#pragma once

#include <optional>
#include <vector>

#include "swingsim/lyapunov.hpp"
#include "swingsim/models.hpp"
#include "swingsim/params.hpp"

namespace swingsim {

struct IntegrationConfig {
  double dt = 1e-4;       // s
  double t_max = 300.0;   // s
  /// Converged once the state-derivative norm stays below this for 100
  /// consecutive steps. Mixed units (rad/s^2 with rad/s and 1/s components).
  double conv_tol = 1e-6;
  /// Diverged once |omega - omega_star| exceeds this; defaults to
  /// 10*omega_star when unset.
  std::optional<double> div_bound;
  /// When set, every recorded sample carries the energy value and rate of
  /// this set kind.
  std::optional<RoaKind> lyap_kind;
  /// Record every Nth step (the initial and final samples are always kept).
  int record_stride = 1;
};

enum class Verdict { Converged, Diverged, HitSingularity, MaxTime };

const char* verdict_name(Verdict v);

struct TrajectorySample {
  double t = 0.0;
  SimState state;
  std::optional<double> energy;       // V/W/U at the sample
  std::optional<double> energy_rate;  // matching time derivative
};

struct Trajectory {
  std::vector<TrajectorySample> samples;  // timestamps strictly increasing
  Verdict verdict = Verdict::MaxTime;
  double t_end = 0.0;
  SimState final_state;
  std::optional<double> singular_time;  // set iff verdict == HitSingularity
};

/// Classical fixed-step 4th-order integration of one model. Terminates early
/// with HitSingularity as soon as any stage would evaluate an omega-dividing
/// model at or below the speed floor. Throws InvalidConfig / ShapeMismatch /
/// SingularState (the latter when the initial state is already singular).
Trajectory integrate(ModelKind kind, const GeneratorParams& p,
                     const SimState& s0, const IntegrationConfig& cfg);

/// Richardson-style step check: integrates with dt and dt/2 and reports the
/// largest state difference at shared sample times. verdict_mismatch flags
/// runs the two resolutions classified differently.
struct StepCheck {
  double max_state_diff = 0.0;
  bool verdict_mismatch = false;
};

StepCheck halve_step_check(ModelKind kind, const GeneratorParams& p,
                           const SimState& s0, const IntegrationConfig& cfg);

}  // namespace swingsim
