#ifndef SFR_IEEEG1_HPP
#define SFR_IEEEG1_HPP

#include "sfr/errors.hpp"
#include "sfr/types.hpp"

namespace sfr {

// IEEEG1 steam-governor constants (the usual K/T naming).
struct Ieeeg1Params {
  double k_1 = 0.0, k_2 = 0.0, k_3 = 0.0, k_4 = 0.0;
  double k_5 = 0.0, k_6 = 0.0, k_7 = 0.0, k_8 = 0.0;
  double t_4 = 0.0, t_5 = 0.0, t_6 = 0.0, t_7 = 0.0;
};

// Approximate reduction of the multi-stage IEEEG1 model to the single lead-lag
// (1 + t_1 s)/(1 + t_g s) consumed by the aggregate model:
//   t_g <- t_5 (dominant reheat lag), t_1 <- t_4 (steam-chest/first-stage lead).
// This is a coarse, documented approximation; callers with better data should
// set (t_1, t_g) directly instead.
struct LeadLag {
  double t_1 = 0.0;
  double t_g = 0.0;
};

inline LeadLag approximate_lead_lag(const Ieeeg1Params& p) {
  if (!(p.t_5 > 0.0))
    throw Error(ErrorCode::NonPositiveParameter,
                "IEEEG1 reduction needs t_5 > 0 (dominant reheat lag)");
  LeadLag ll;
  ll.t_g = p.t_5;
  ll.t_1 = p.t_4;
  if (!(ll.t_1 < ll.t_g))
    throw Error(ErrorCode::NonPositiveParameter,
                "IEEEG1 reduction produced t_1 >= t_g; supply (t_1, t_g) directly");
  return ll;
}

}  // namespace sfr

#endif  // SFR_IEEEG1_HPP
