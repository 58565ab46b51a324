#ifndef SFR_TEST_UTIL_HPP
#define SFR_TEST_UTIL_HPP

#include <random>

#include "sfr/model.hpp"
#include "sfr/types.hpp"

namespace sfr_test {

struct RandomCase {
  sfr::AggregateSfr agg;
  sfr::StepFfr step;
  sfr::Disturbance dist;
};

// Sampling ranges around typical bulk-system magnitudes:
//   H in [2, 8] s, D in [0.5, 40], R_g in [0.03, 0.1], T_1 in [0, 1] s,
//   T_g in [2, 15] s, delta_p_d in [-0.3, -0.01], p_sus in [0, 0.1],
//   t_1 in [0.02, 0.1] s, t_2 in [0.2, 0.6] s.
// Draws are rejected until underdamped with zeta <= 0.999 (the analytic path
// refuses the band around critical damping).
inline sfr::AggregateSfr sample_underdamped_aggregate(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> h(2.0, 8.0), d(0.5, 40.0), r(0.03, 0.1),
      t1(0.0, 1.0), tg(2.0, 15.0);
  for (;;) {
    sfr::AggregateSfr agg;
    agg.h_sigma = h(rng);
    agg.d_sigma = d(rng);
    agg.r_g = r(rng);
    agg.t_1 = t1(rng);
    agg.t_g = tg(rng);
    agg.f_n = 60.0;
    agg.s_base = 1000.0;
    try {
      const sfr::SecondOrderCharacteristics c = sfr::characteristics(agg);
      if (c.zeta <= 0.999) return agg;
    } catch (const sfr::Error&) {
    }
  }
}

inline RandomCase sample_case(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dp(-0.3, -0.01), psus(0.0, 0.1),
      t1(0.02, 0.1), t2(0.2, 0.6);
  RandomCase c;
  c.agg = sample_underdamped_aggregate(rng);
  c.step.p_sus = psus(rng);
  c.step.t_1 = t1(rng);
  c.step.t_2 = t2(rng);
  c.dist.delta_p_d = dp(rng);
  c.dist.label = "random";
  return c;
}

// Single-machine system with round-number parameters used as the fixed fixture everywhere.
inline RandomCase fixture_case() {
  RandomCase c;
  c.agg = {4.0, 1.0, 0.05, 0.3, 10.0, 60.0, 1000.0};
  c.step = {0.04, 0.05, 0.35};
  c.dist = {-0.1, "fixture"};
  return c;
}

}  // namespace sfr_test

#endif  // SFR_TEST_UTIL_HPP
