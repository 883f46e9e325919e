#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "swingsim/params.hpp"

namespace swingtest {

inline constexpr double kPi = std::numbers::pi;
inline const double kNominal = 2.0 * kPi * 60.0;

/// The shared simulation machine: M = 0.2, A = 0.04, omega_star = 2*pi*60.
inline swingsim::GeneratorParams machine() {
  return swingsim::GeneratorParams::from_momentum(0.2, 0.04, kNominal);
}

inline swingsim::GeneratorParams example1() {
  return machine().with_power(1.0, 2.0);
}
inline swingsim::GeneratorParams example2() {
  return machine().with_power(1.0, 4.65);
}
inline swingsim::GeneratorParams example3() {
  return machine().with_power(1.0, 4.90);
}
inline swingsim::GeneratorParams smib_machine() {
  return machine().with_mech_power(1.0).with_coupling(2.0);
}

inline double rel_err(double actual, double expected) {
  const double scale = std::max(std::abs(expected), 1e-300);
  return std::abs(actual - expected) / scale;
}

inline std::mt19937_64 rng(unsigned seed = 20240613u) {
  return std::mt19937_64(seed);
}

}  // namespace swingtest
