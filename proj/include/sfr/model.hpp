#ifndef SFR_MODEL_HPP
#define SFR_MODEL_HPP

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "sfr/errors.hpp"
#include "sfr/ffr.hpp"
#include "sfr/types.hpp"

namespace sfr {

inline void validate(const UnitRecord& unit) {
  const std::string where = "unit '" + unit.id + "': ";
  if (!(unit.rating > 0.0))
    throw Error(ErrorCode::NonPositiveParameter, where + "rating must be > 0");
  if (unit.kind == UnitKind::SynchronousGenerator) {
    if (!unit.sg_params || unit.ffr)
      throw Error(ErrorCode::NonPositiveParameter,
                  where + "a synchronous generator carries sg_params and no ffr");
    const SgParams& p = *unit.sg_params;
    if (!(p.h_g > 0.0))
      throw Error(ErrorCode::NonPositiveParameter, where + "h_g must be > 0");
    if (p.d_g < 0.0)
      throw Error(ErrorCode::NonPositiveParameter, where + "d_g must be >= 0");
    if (!(p.r_g > 0.0))
      throw Error(ErrorCode::NonPositiveParameter, where + "r_g must be > 0");
    if (p.t_1 < 0.0)
      throw Error(ErrorCode::NonPositiveParameter, where + "t_1 must be >= 0");
    if (!(p.t_g > 0.0))
      throw Error(ErrorCode::NonPositiveParameter, where + "t_g must be > 0");
    if (!(p.t_1 < p.t_g))
      throw Error(ErrorCode::NonPositiveParameter, where + "requires t_1 < t_g");
  } else {
    if (!unit.ffr || unit.sg_params)
      throw Error(ErrorCode::NonPositiveParameter,
                  where + "an inverter resource carries ffr and no sg_params");
    const FfrPortfolio& f = *unit.ffr;
    if (f.empty())
      throw Error(ErrorCode::NonPositiveParameter,
                  where + "ffr portfolio must have at least one member");
    if (f.step) validate(*f.step);
    if (f.proportional && !(f.proportional->r_ibr > 0.0))
      throw Error(ErrorCode::NonPositiveParameter, where + "r_ibr must be > 0");
    if (f.derivative && f.derivative->h_ibr < 0.0)
      throw Error(ErrorCode::NonPositiveParameter, where + "h_ibr must be >= 0");
  }
}

// Reduces a fleet to the single-machine equivalent on s_base. Inertia, damping
// and 1/R_g are capacity-weighted sums; governor time constants are
// capacity-weighted means over the synchronous units. Droop FFR lands in
// d_sigma and derivative FFR in h_sigma; step FFR is collected separately by
// collect_step_ffr.
inline AggregateSfr aggregate_fleet(std::span<const UnitRecord> units, double s_base,
                                    double f_n) {
  if (!(s_base > 0.0))
    throw Error(ErrorCode::NonPositiveParameter, "s_base must be > 0");
  if (!(f_n > 0.0))
    throw Error(ErrorCode::NonPositiveParameter, "f_n must be > 0");
  if (units.empty())
    throw Error(ErrorCode::NonPositiveParameter, "fleet must be non-empty");

  double h_sg = 0.0, d_sg = 0.0, inv_r_g = 0.0;
  double h_ibr = 0.0, d_ibr = 0.0;
  double sg_capacity = 0.0, t1_weighted = 0.0, tg_weighted = 0.0;

  for (const UnitRecord& unit : units) {
    validate(unit);
    const double w = unit.rating / s_base;
    if (unit.kind == UnitKind::SynchronousGenerator) {
      const SgParams& p = *unit.sg_params;
      h_sg += p.h_g * w;
      d_sg += p.d_g * w;
      inv_r_g += w / p.r_g;
      sg_capacity += unit.rating;
      t1_weighted += p.t_1 * unit.rating;
      tg_weighted += p.t_g * unit.rating;
    } else {
      const FfrPortfolio& f = *unit.ffr;
      if (f.proportional) d_ibr += w / f.proportional->r_ibr;
      if (f.derivative) h_ibr += f.derivative->h_ibr * w;
    }
  }

  if (sg_capacity == 0.0)
    throw Error(ErrorCode::NoSynchronousGeneration,
                "fleet has no synchronous generator; governor path undefined");

  AggregateSfr agg;
  agg.h_sigma = h_sg + h_ibr;
  agg.d_sigma = d_sg + d_ibr;
  agg.r_g = 1.0 / inv_r_g;
  agg.t_1 = t1_weighted / sg_capacity;
  agg.t_g = tg_weighted / sg_capacity;
  agg.f_n = f_n;
  agg.s_base = s_base;
  return agg;
}

// Sums step-FFR members onto the system base. All members must share the same
// (t_1, t_2); heterogeneous timing is rejected. No members yields the zero
// StepFfr.
inline StepFfr collect_step_ffr(std::span<const UnitRecord> units, double s_base) {
  if (!(s_base > 0.0))
    throw Error(ErrorCode::NonPositiveParameter, "s_base must be > 0");
  StepFfr total{0.0, 0.0, 1.0};
  bool first = true;
  for (const UnitRecord& unit : units) {
    validate(unit);
    if (unit.kind != UnitKind::InverterResource || !unit.ffr->step) continue;
    const StepFfr& s = *unit.ffr->step;
    if (first) {
      total.t_1 = s.t_1;
      total.t_2 = s.t_2;
      first = false;
    } else if (s.t_1 != total.t_1 || s.t_2 != total.t_2) {
      throw Error(ErrorCode::HeterogeneousStepTiming,
                  "unit '" + unit.id + "' step timing differs from the fleet's");
    }
    total.p_sus += s.p_sus * unit.rating / s_base;
  }
  return total;
}

// Equivalent droop (as 1/R) and emulated inertia absorbed from the inverter
// fleet; used only to reconstruct per-FFR power columns in reports.
struct FfrSplit {
  double r_ibr_inv = 0.0;  // p.u.; sum of 1/r_ibr scaled to system base
  double h_ibr = 0.0;      // s
};

inline FfrSplit absorbed_ffr_split(std::span<const UnitRecord> units, double s_base) {
  FfrSplit split;
  for (const UnitRecord& unit : units) {
    if (unit.kind != UnitKind::InverterResource) continue;
    const double w = unit.rating / s_base;
    if (unit.ffr->proportional) split.r_ibr_inv += w / unit.ffr->proportional->r_ibr;
    if (unit.ffr->derivative) split.h_ibr += unit.ffr->derivative->h_ibr * w;
  }
  return split;
}

inline void validate(const AggregateSfr& agg) {
  if (!(agg.h_sigma > 0.0))
    throw Error(ErrorCode::NonPositiveParameter, "h_sigma must be > 0");
  if (agg.d_sigma < 0.0)
    throw Error(ErrorCode::NonPositiveParameter, "d_sigma must be >= 0");
  if (!(agg.r_g > 0.0))
    throw Error(ErrorCode::NonPositiveParameter, "r_g must be > 0");
  if (agg.t_1 < 0.0)
    throw Error(ErrorCode::NonPositiveParameter, "t_1 must be >= 0");
  if (!(agg.t_g > 0.0))
    throw Error(ErrorCode::NonPositiveParameter, "t_g must be > 0");
  if (!(agg.t_1 < agg.t_g))
    throw Error(ErrorCode::NonPositiveParameter, "requires t_1 < t_g");
  if (!(agg.f_n > 0.0))
    throw Error(ErrorCode::NonPositiveParameter, "f_n must be > 0");
}

// Damping ratio, natural frequency, damped frequency and phase angle of the
// second-order equivalent. Only the underdamped regime is representable;
// zeta >= 1 raises Overdamped and the caller falls back to the ODE path.
inline SecondOrderCharacteristics characteristics(const AggregateSfr& agg) {
  validate(agg);
  const double inv_r = 1.0 / agg.r_g;
  const double denom = agg.d_sigma + inv_r;
  SecondOrderCharacteristics c;
  c.omega_n = std::sqrt(denom / (2.0 * agg.t_g * agg.h_sigma));
  c.zeta = 0.5 *
           ((agg.d_sigma + (agg.t_1 / agg.t_g) * inv_r) / (2.0 * agg.h_sigma) +
            1.0 / agg.t_g) *
           std::sqrt(2.0 * agg.t_g * agg.h_sigma / denom);
  if (c.zeta >= 1.0)
    throw Error(ErrorCode::Overdamped,
                "zeta = " + std::to_string(c.zeta) + " >= 1; use the ODE solver");
  if (c.zeta <= 0.0)
    throw Error(ErrorCode::Undamped, "zeta = " + std::to_string(c.zeta) + " <= 0");
  c.omega_d = c.omega_n * std::sqrt(1.0 - c.zeta * c.zeta);
  c.phi = std::acos(c.zeta);
  return c;
}

}  // namespace sfr

#endif  // SFR_MODEL_HPP
