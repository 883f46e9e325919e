#include "swingsim/params.hpp"

#include <cmath>

namespace swingsim {

void GeneratorParams::validate() const {
  if (!(inertia_ > 0.0) || !std::isfinite(inertia_))
    throw InvalidParams("inertia must be positive");
  if (!(damping_ > 0.0) || !std::isfinite(damping_))
    throw InvalidParams("damping must be positive");
  if (!(viscous_ >= 0.0) || !std::isfinite(viscous_))
    throw InvalidParams("viscous loss must be nonnegative");
  if (!(omega_star_ > 0.0) || !std::isfinite(omega_star_))
    throw InvalidParams("omega_star must be positive");
  if (coupling_ && (!(*coupling_ > 0.0) || !std::isfinite(*coupling_)))
    throw InvalidParams("coupling must be positive when present");
  if (!std::isfinite(p_mech_) || !std::isfinite(p_load_))
    throw InvalidParams("powers must be finite");
}

GeneratorParams GeneratorParams::from_inertia(double inertia, double damping,
                                              double omega_star) {
  GeneratorParams p;
  p.inertia_ = inertia;
  p.damping_ = damping;
  p.omega_star_ = omega_star;
  p.momentum_ = inertia * omega_star;
  p.damping_coeff_ = damping * omega_star;
  p.validate();
  return p;
}

GeneratorParams GeneratorParams::from_momentum(double momentum,
                                               double damping_coeff,
                                               double omega_star) {
  GeneratorParams p;
  p.inertia_ = momentum / omega_star;
  p.damping_ = damping_coeff / omega_star;
  p.omega_star_ = omega_star;
  p.momentum_ = momentum;
  p.damping_coeff_ = damping_coeff;
  p.validate();
  return p;
}

GeneratorParams GeneratorParams::with_power(double p_mech,
                                            double p_load) const {
  GeneratorParams p = *this;
  p.p_mech_ = p_mech;
  p.p_load_ = p_load;
  p.validate();
  return p;
}

GeneratorParams GeneratorParams::with_mech_power(double p_mech) const {
  GeneratorParams p = *this;
  p.p_mech_ = p_mech;
  p.validate();
  return p;
}

GeneratorParams GeneratorParams::with_viscous_loss(double viscous) const {
  GeneratorParams p = *this;
  p.viscous_ = viscous;
  p.validate();
  return p;
}

GeneratorParams GeneratorParams::with_coupling(double coupling) const {
  GeneratorParams p = *this;
  p.coupling_ = coupling;
  p.validate();
  return p;
}

double GeneratorParams::coupling_or_throw() const {
  if (!coupling_)
    throw InvalidParams("scenario requires the coupling coefficient gamma");
  return *coupling_;
}

}  // namespace swingsim
