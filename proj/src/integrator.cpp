#include "swingsim/integrator.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "swingsim/equilibria.hpp"
#include "swingsim/errors.hpp"

namespace swingsim {

namespace {

constexpr int kConvergedStreak = 100;

// Internal packed layout: [omega, delta?, xi?], active components by kind.
struct Layout {
  bool has_delta = false;
  bool has_xi = false;
  int n = 1;
};

Layout layout_for(ModelKind kind) {
  Layout l;
  l.has_delta = model_has_delta(kind);
  l.has_xi = model_has_xi(kind);
  l.n = 1 + (l.has_delta ? 1 : 0) + (l.has_xi ? 1 : 0);
  return l;
}

using Packed = std::array<double, 3>;

Packed pack(const Layout& l, const SimState& s) {
  Packed x{s.omega, 0.0, 0.0};
  int i = 1;
  if (l.has_delta) x[i++] = *s.delta;
  if (l.has_xi) x[i++] = *s.xi;
  return x;
}

SimState unpack(const Layout& l, const Packed& x) {
  SimState s;
  s.omega = x[0];
  int i = 1;
  if (l.has_delta) s.delta = x[i++];
  if (l.has_xi) s.xi = x[i++];
  return s;
}

Packed pack_deriv(const Layout& l, const StateDeriv& d) {
  Packed x{d.domega, 0.0, 0.0};
  int i = 1;
  if (l.has_delta) x[i++] = *d.ddelta;
  if (l.has_xi) x[i++] = *d.dxi;
  return x;
}

double packed_norm(const Layout& l, const Packed& x) {
  double sq = 0.0;
  for (int i = 0; i < l.n; ++i) sq += x[i] * x[i];
  return std::sqrt(sq);
}

bool rate_needs_speed(RoaKind kind) {
  return kind == RoaKind::OmegaS || kind == RoaKind::OmegaK ||
         kind == RoaKind::SmibLevelSet;
}

// Instrumentation set for a (model, set-kind) pair. The losses model is
// observed through the energy of its loss-free reduction, whose trajectories
// coincide with the original ones.
RoaSet instrumentation_set(ModelKind model, RoaKind kind,
                           const GeneratorParams& p) {
  GeneratorParams effective = p;
  ModelKind owner = model;
  if (model == ModelKind::ImprovedLoadWithLosses &&
      (kind == RoaKind::OmegaS || kind == RoaKind::OmegaK)) {
    effective = reduce_losses(p);
    owner = ModelKind::ImprovedLoad;
  }
  if (roa_model(kind) != owner)
    throw ShapeMismatch(std::string("set kind ") + roa_kind_name(kind) +
                        " does not instrument model " + model_name(model));
  return make_roa_set(kind, effective);
}

void validate_config(const IntegrationConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt))
    throw InvalidConfig("dt must be positive");
  if (!(cfg.t_max >= cfg.dt) || !std::isfinite(cfg.t_max))
    throw InvalidConfig("t_max must be at least dt");
  if (!(cfg.conv_tol > 0.0)) throw InvalidConfig("conv_tol must be positive");
  if (cfg.div_bound && !(*cfg.div_bound > 0.0))
    throw InvalidConfig("div_bound must be positive");
  if (cfg.record_stride < 1)
    throw InvalidConfig("record_stride must be at least 1");
}

}  // namespace

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Converged: return "Converged";
    case Verdict::Diverged: return "Diverged";
    case Verdict::HitSingularity: return "HitSingularity";
    case Verdict::MaxTime: return "MaxTime";
  }
  return "unknown";
}

Trajectory integrate(ModelKind kind, const GeneratorParams& p,
                     const SimState& s0, const IntegrationConfig& cfg) {
  validate_config(cfg);
  const Layout lay = layout_for(kind);
  if (lay.has_delta != s0.delta.has_value() ||
      lay.has_xi != s0.xi.has_value())
    throw ShapeMismatch(std::string("initial state shape does not match ") +
                        model_name(kind));

  const bool singular_model = model_is_singular(kind);
  if (singular_model && !(s0.omega > kSpeedFloor))
    throw SingularState("initial rotor speed is at or below the floor");

  std::optional<RoaSet> lyap;
  if (cfg.lyap_kind)
    lyap = instrumentation_set(kind, *cfg.lyap_kind, p);

  const double div_bound =
      cfg.div_bound ? *cfg.div_bound : 10.0 * p.omega_star();

  Trajectory traj;
  auto record = [&](double t, const Packed& x) {
    TrajectorySample sample;
    sample.t = t;
    sample.state = unpack(lay, x);
    if (lyap) {
      sample.energy = roa_energy(*lyap, sample.state);
      if (!rate_needs_speed(lyap->kind) || sample.state.omega > kSpeedFloor)
        sample.energy_rate = roa_energy_rate(*lyap, sample.state);
    }
    traj.samples.push_back(std::move(sample));
  };

  auto eval = [&](const Packed& x) {
    return pack_deriv(lay, rhs(kind, p, unpack(lay, x)));
  };

  const long n_max = std::lround(std::ceil(cfg.t_max / cfg.dt - 1e-9));
  Packed x = pack(lay, s0);
  double t = 0.0;
  long last_recorded = -1;
  int streak = 0;

  record(0.0, x);
  last_recorded = 0;

  auto finish = [&](Verdict v, long step) {
    traj.verdict = v;
    traj.t_end = t;
    traj.final_state = unpack(lay, x);
    if (v == Verdict::HitSingularity) traj.singular_time = t;
    if (step != last_recorded) record(t, x);
  };

  if (std::abs(x[0] - p.omega_star()) > div_bound) {
    finish(Verdict::Diverged, 0);
    return traj;
  }

  for (long step = 0;; ++step) {
    const Packed k1 = eval(x);
    if (packed_norm(lay, k1) < cfg.conv_tol) {
      if (++streak >= kConvergedStreak) {
        finish(Verdict::Converged, step);
        return traj;
      }
    } else {
      streak = 0;
    }
    if (step >= n_max) {
      finish(Verdict::MaxTime, step);
      return traj;
    }

    const double dt = cfg.dt;
    Packed x2 = x, x3 = x, x4 = x;
    for (int i = 0; i < lay.n; ++i) x2[i] += 0.5 * dt * k1[i];
    if (singular_model && !(x2[0] > kSpeedFloor)) {
      finish(Verdict::HitSingularity, step);
      return traj;
    }
    const Packed k2 = eval(x2);
    for (int i = 0; i < lay.n; ++i) x3[i] += 0.5 * dt * k2[i];
    if (singular_model && !(x3[0] > kSpeedFloor)) {
      finish(Verdict::HitSingularity, step);
      return traj;
    }
    const Packed k3 = eval(x3);
    for (int i = 0; i < lay.n; ++i) x4[i] += dt * k3[i];
    if (singular_model && !(x4[0] > kSpeedFloor)) {
      finish(Verdict::HitSingularity, step);
      return traj;
    }
    const Packed k4 = eval(x4);

    for (int i = 0; i < lay.n; ++i)
      x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t = (step + 1) * dt;

    if (singular_model && !(x[0] > kSpeedFloor)) {
      finish(Verdict::HitSingularity, step + 1);
      return traj;
    }
    if (std::abs(x[0] - p.omega_star()) > div_bound) {
      finish(Verdict::Diverged, step + 1);
      return traj;
    }
    if ((step + 1) % cfg.record_stride == 0) {
      record(t, x);
      last_recorded = step + 1;
    }
  }
}

StepCheck halve_step_check(ModelKind kind, const GeneratorParams& p,
                           const SimState& s0, const IntegrationConfig& cfg) {
  validate_config(cfg);
  IntegrationConfig fine = cfg;
  fine.dt = 0.5 * cfg.dt;
  fine.record_stride =
      cfg.record_stride > std::numeric_limits<int>::max() / 2
          ? std::numeric_limits<int>::max()
          : 2 * cfg.record_stride;

  const Trajectory coarse = integrate(kind, p, s0, cfg);
  const Trajectory halved = integrate(kind, p, s0, fine);

  StepCheck check;
  check.verdict_mismatch = coarse.verdict != halved.verdict;

  // Walk both sample lists and compare states at matching timestamps.
  const double t_tol = 0.25 * cfg.dt;
  std::size_t j = 0;
  for (const auto& a : coarse.samples) {
    while (j < halved.samples.size() && halved.samples[j].t < a.t - t_tol) ++j;
    if (j == halved.samples.size()) break;
    const auto& b = halved.samples[j];
    if (std::abs(b.t - a.t) > t_tol) continue;
    double diff = std::abs(a.state.omega - b.state.omega);
    if (a.state.delta && b.state.delta)
      diff = std::max(diff, std::abs(*a.state.delta - *b.state.delta));
    if (a.state.xi && b.state.xi)
      diff = std::max(diff, std::abs(*a.state.xi - *b.state.xi));
    check.max_state_diff = std::max(check.max_state_diff, diff);
  }
  return check;
}

}  // namespace swingsim
