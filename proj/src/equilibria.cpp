#include "swingsim/equilibria.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "swingsim/errors.hpp"

namespace swingsim {

double discriminant(const GeneratorParams& p, double u_bar) {
  const double ws = p.omega_star();
  return ws * ws + 4.0 * (u_bar + p.p_mech() - p.p_load()) / p.damping();
}

EquilibriumPair load_equilibria(const GeneratorParams& p, double u_bar) {
  EquilibriumPair pair;
  pair.discriminant = discriminant(p, u_bar);
  pair.exists = pair.discriminant > 0.0;
  if (!pair.exists) return pair;

  // The stable root has no cancellation; the unstable one is recovered from
  // the root product -(u + P_m - P_e)/D_d, which stays accurate when the
  // power imbalance is small.
  const double ws = p.omega_star();
  const double stable = 0.5 * (ws + std::sqrt(pair.discriminant));
  const double imbalance = u_bar + p.p_mech() - p.p_load();
  pair.omega_stable = stable;
  pair.omega_unstable = -imbalance / (p.damping() * stable);
  return pair;
}

SmibEquilibrium smib_equilibrium(const GeneratorParams& p) {
  const double ratio = p.p_mech() / p.coupling_or_throw();
  if (std::abs(ratio) > 1.0)
    throw NoEquilibrium("P_m/gamma = " + std::to_string(ratio) +
                        " exceeds the transferable power");
  SmibEquilibrium eq;
  eq.delta_bar = std::asin(ratio);
  eq.omega = p.omega_star();
  eq.roa_eligible = ratio > 0.0 && ratio < 2.0 / std::numbers::pi;
  return eq;
}

GeneratorParams reduce_losses(const GeneratorParams& p) {
  if (p.viscous_loss() == 0.0) return p;
  const double total = p.viscous_loss() + p.damping();
  const double shifted_star = p.damping() * p.omega_star() / total;
  GeneratorParams out =
      GeneratorParams::from_inertia(p.inertia(), total, shifted_star)
          .with_power(p.p_mech(), p.p_load());
  if (p.coupling()) out = out.with_coupling(*p.coupling());
  return out;
}

}  // namespace swingsim
