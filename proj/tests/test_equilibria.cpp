#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "swingsim/equilibria.hpp"
#include "swingsim/models.hpp"

using namespace swingsim;
using namespace swingtest;

namespace {

// Independent root finder: scan the improved vector field for sign changes
// over (floor, 3*omega_star] and bisect each bracket. Never touches the
// closed-form quadratic.
std::vector<double> scan_roots(const GeneratorParams& p, double u_bar = 0.0) {
  auto field = [&](double omega) {
    return (-p.damping() * (omega - p.omega_star()) +
            (u_bar + p.p_mech() - p.p_load()) / omega) /
           p.inertia();
  };
  std::vector<double> roots;
  const int n = 20000;
  const double lo = 1e-5, hi = 3.0 * p.omega_star();
  double prev_x = lo, prev_f = field(lo);
  for (int i = 1; i <= n; ++i) {
    const double x = lo + (hi - lo) * i / n;
    const double f = field(x);
    if (prev_f == 0.0) roots.push_back(prev_x);
    if (prev_f * f < 0.0) {
      double a = prev_x, b = x, fa = prev_f;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = field(m);
        if (fa * fm <= 0.0)
          b = m;
        else
          a = m, fa = fm;
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_x = x;
    prev_f = f;
  }
  return roots;
}

}  // namespace

TEST_CASE("discriminant: balanced power gives omega_star squared") {
  auto p = machine().with_power(2.0, 2.0);
  CHECK(discriminant(p) == kNominal * kNominal);
}

TEST_CASE("discriminant and roots for the shared load examples") {
  // P_m = 1, P_e = 2: stable root at 55.72 Hz.
  auto p1 = example1();
  CHECK(rel_err(discriminant(p1), 1.0442319153260921e5) < 1e-12);
  const EquilibriumPair pair1 = load_equilibria(p1);
  REQUIRE(pair1.exists);
  CHECK(rel_err(*pair1.omega_stable, 350.0684464308864) < 1e-12);
  CHECK(*pair1.omega_stable / (2.0 * kPi) ==
        doctest::Approx(55.72).epsilon(2e-4));

  // P_m = 1, P_e = 4.65: unstable root near 24.65 Hz.
  const EquilibriumPair pair2 = load_equilibria(example2());
  REQUIRE(pair2.exists);
  CHECK(*pair2.omega_unstable / (2.0 * kPi) ==
        doctest::Approx(24.65).epsilon(1e-3));

  // P_m = 1, P_e = 4.90: no steady state.
  auto p3 = example3();
  CHECK(discriminant(p3) < 0.0);
  CHECK_FALSE(load_equilibria(p3).exists);
  CHECK_FALSE(load_equilibria(p3).omega_stable.has_value());
}

TEST_CASE("controlled discriminant shifts with the constant input") {
  auto p = example3();
  CHECK_FALSE(load_equilibria(p).exists);
  // A large enough constant input restores the steady state.
  CHECK(load_equilibria(p, 3.9).exists);
  CHECK(discriminant(p, 3.9) == doctest::Approx(kNominal * kNominal));
}

TEST_CASE("balanced power pins the roots at (omega_star, 0)") {
  auto p = machine().with_power(3.0, 3.0);
  const EquilibriumPair pair = load_equilibria(p);
  REQUIRE(pair.exists);
  CHECK(rel_err(*pair.omega_stable, kNominal) < 1e-13);
  CHECK(*pair.omega_unstable == 0.0);
}

TEST_CASE("roots agree with the independent bisection scan") {
  auto gen = rng(67);
  std::uniform_real_distribution<double> m_draw(0.05, 0.5);
  std::uniform_real_distribution<double> a_draw(0.01, 0.2);
  std::uniform_real_distribution<double> ws_draw(200.0, 500.0);
  std::uniform_real_distribution<double> pow_draw(0.2, 5.0);
  int checked = 0;
  while (checked < 100) {
    auto p = GeneratorParams::from_momentum(m_draw(gen), a_draw(gen),
                                            ws_draw(gen))
                 .with_power(pow_draw(gen), pow_draw(gen));
    const EquilibriumPair pair = load_equilibria(p);
    if (!pair.exists || !(*pair.omega_unstable > 1.0)) continue;
    ++checked;
    const std::vector<double> roots = scan_roots(p);
    REQUIRE(roots.size() == 2);
    CHECK(std::abs(roots[0] - *pair.omega_unstable) < 1e-8);
    CHECK(std::abs(roots[1] - *pair.omega_stable) < 1e-8);
  }
}

TEST_CASE("root identities hold across random parameter draws") {
  auto gen = rng(71);
  std::uniform_real_distribution<double> m_draw(0.05, 0.5);
  std::uniform_real_distribution<double> a_draw(0.01, 0.2);
  std::uniform_real_distribution<double> ws_draw(100.0, 600.0);
  std::uniform_real_distribution<double> pow_draw(-5.0, 5.0);
  std::uniform_real_distribution<double> u_draw(-1.0, 1.0);
  int checked = 0;
  while (checked < 200) {
    auto p = GeneratorParams::from_momentum(m_draw(gen), a_draw(gen),
                                            ws_draw(gen))
                 .with_power(pow_draw(gen), pow_draw(gen));
    const double u_bar = u_draw(gen);
    const EquilibriumPair pair = load_equilibria(p, u_bar);
    CHECK(pair.exists == (pair.discriminant > 0.0));
    if (!pair.exists) continue;
    ++checked;

    const double ws_root = *pair.omega_stable;
    const double wu_root = *pair.omega_unstable;
    CHECK(ws_root > wu_root);
    // Sum and product of the roots.
    CHECK(rel_err(ws_root + wu_root, p.omega_star()) < 1e-12);
    const double imbalance = u_bar + p.p_mech() - p.p_load();
    CHECK(rel_err(ws_root * wu_root, -imbalance / p.damping()) < 1e-12);
    // Both roots satisfy the defining balance with small relative residual.
    for (double root : {ws_root, wu_root}) {
      const double residual =
          p.damping() * root * (root - p.omega_star()) - imbalance;
      const double scale = std::max(
          std::abs(imbalance), p.damping() * ws_root * p.omega_star());
      CHECK(std::abs(residual) / scale < 1e-9);
    }
  }
}

TEST_CASE("a double root does not count as a steady state") {
  // omega_star = 2, D_d = 1, P_m - P_e = -1 makes the discriminant exactly 0.
  auto p = GeneratorParams::from_inertia(1.0, 1.0, 2.0).with_power(0.0, 1.0);
  CHECK(discriminant(p) == 0.0);
  CHECK_FALSE(load_equilibria(p).exists);
  CHECK(load_equilibria(p.with_power(0.0, 0.999)).exists);
}

TEST_CASE("infinite-bus equilibrium") {
  auto p = smib_machine();
  const SmibEquilibrium eq = smib_equilibrium(p);
  CHECK(eq.delta_bar == doctest::Approx(kPi / 6.0).epsilon(1e-14));
  CHECK(eq.omega == kNominal);
  CHECK(eq.roa_eligible);

  CHECK(smib_equilibrium(machine().with_mech_power(0.0).with_coupling(2.0))
            .delta_bar == 0.0);
  CHECK_FALSE(
      smib_equilibrium(machine().with_mech_power(0.0).with_coupling(2.0))
          .roa_eligible);

  // 0.7 exceeds 2/pi: equilibrium exists but the estimate does not apply.
  const SmibEquilibrium high =
      smib_equilibrium(machine().with_mech_power(0.7).with_coupling(1.0));
  CHECK(high.delta_bar == doctest::Approx(std::asin(0.7)));
  CHECK_FALSE(high.roa_eligible);

  const SmibEquilibrium neg =
      smib_equilibrium(machine().with_mech_power(-0.3).with_coupling(1.0));
  CHECK(neg.delta_bar < 0.0);
  CHECK_FALSE(neg.roa_eligible);

  CHECK_THROWS_AS(
      smib_equilibrium(machine().with_mech_power(1.2).with_coupling(1.0)),
      NoEquilibrium);
}

TEST_CASE("loss reduction: identity, direct substitution, idempotence") {
  auto p = example1();
  auto same = reduce_losses(p);
  CHECK(same.damping() == p.damping());
  CHECK(same.omega_star() == p.omega_star());

  auto lossy = p.with_viscous_loss(p.damping());
  auto reduced = reduce_losses(lossy);
  CHECK(rel_err(reduced.omega_star(), 0.5 * p.omega_star()) < 1e-15);
  CHECK(rel_err(reduced.damping(), 2.0 * p.damping()) < 1e-15);
  CHECK(reduced.viscous_loss() == 0.0);
  CHECK(reduced.p_mech() == p.p_mech());
  CHECK(reduced.p_load() == p.p_load());

  auto twice = reduce_losses(reduced);
  CHECK(twice.damping() == reduced.damping());
  CHECK(twice.omega_star() == reduced.omega_star());
}

TEST_CASE("momentum-form construction is exact in the given direction") {
  auto p = machine();
  CHECK(p.momentum() == 0.2);
  CHECK(p.damping_coeff() == 0.04);
  CHECK(p.inertia() == 0.2 / p.omega_star());
  CHECK(p.damping() == 0.04 / p.omega_star());

  auto q = GeneratorParams::from_inertia(0.001, 0.0002, 314.0);
  CHECK(q.momentum() == 0.001 * 314.0);
  CHECK(q.damping_coeff() == 0.0002 * 314.0);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(GeneratorParams::from_inertia(-1.0, 1.0, 1.0),
                  InvalidParams);
  CHECK_THROWS_AS(GeneratorParams::from_inertia(1.0, 0.0, 1.0), InvalidParams);
  CHECK_THROWS_AS(GeneratorParams::from_momentum(1.0, 1.0, -2.0),
                  InvalidParams);
  CHECK_THROWS_AS(machine().with_viscous_loss(-0.1), InvalidParams);
  CHECK_THROWS_AS(machine().with_coupling(0.0), InvalidParams);
}
