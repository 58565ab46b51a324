#ifndef SFR_FFR_HPP
#define SFR_FFR_HPP

#include <vector>

#include "sfr/errors.hpp"
#include "sfr/types.hpp"

namespace sfr {

// gain * (t - delay) * u(t - delay); Laplace image gain * e^{-delay s} / s^2.
struct DelayedRampInput {
  double gain = 0.0;   // p.u./s
  double delay = 0.0;  // s
};

// Delayed step term: magnitude * u(t - delay); Laplace image c * e^{-delay s} / s.
struct DelayedStepInput {
  double magnitude = 0.0;  // p.u.
  double delay = 0.0;      // s
};

// The full exogenous input, disturbance step plus step-FFR ramps, as a sum of
// delayed steps and delayed ramps.
struct InputDecomposition {
  std::vector<DelayedStepInput> step_terms;
  std::vector<DelayedRampInput> ramp_terms;
};

inline void validate(const StepFfr& ffr) {
  if (ffr.p_sus < 0.0)
    throw Error(ErrorCode::NonPositiveParameter, "step FFR p_sus must be >= 0");
  if (ffr.t_1 < 0.0)
    throw Error(ErrorCode::NonPositiveParameter, "step FFR t_1 must be >= 0");
  if (!(ffr.t_2 > ffr.t_1))
    throw Error(ErrorCode::NonPositiveParameter, "step FFR requires t_2 > t_1");
}

// Step-FFR power at time t: 0 before t_1, linear ramp on [t_1, t_2], p_sus after.
inline double step_power_at(const StepFfr& ffr, double t) {
  if (t <= ffr.t_1) return 0.0;
  if (t >= ffr.t_2) return ffr.p_sus;
  return ffr.p_sus * (t - ffr.t_1) / (ffr.t_2 - ffr.t_1);
}

inline InputDecomposition decompose_input(const StepFfr& ffr, const Disturbance& dist) {
  validate(ffr);
  const double gain = ffr.p_sus / (ffr.t_2 - ffr.t_1);
  InputDecomposition dec;
  dec.step_terms.push_back({dist.delta_p_d, 0.0});
  dec.ramp_terms.push_back({+gain, ffr.t_1});
  dec.ramp_terms.push_back({-gain, ffr.t_2});
  return dec;
}

// Time-domain value of the decomposition; reproduces delta_p_d + step_power_at(t).
inline double decomposition_value(const InputDecomposition& dec, double t) {
  double v = 0.0;
  for (const auto& s : dec.step_terms)
    if (t >= s.delay) v += s.magnitude;
  for (const auto& r : dec.ramp_terms)
    if (t >= r.delay) v += r.gain * (t - r.delay);
  return v;
}

// Droop response power for a given frequency deviation (both p.u.).
inline double proportional_power(double r_ibr, double delta_f) {
  return -delta_f / r_ibr;
}

// Synthetic-inertia power for a given frequency derivative (p.u./s).
inline double derivative_power(double h_ibr, double dfdt) {
  return -2.0 * h_ibr * dfdt;
}

}  // namespace sfr

#endif  // SFR_FFR_HPP
