#ifndef SFR_RK4_HPP
#define SFR_RK4_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sfr/errors.hpp"
#include "sfr/ffr.hpp"
#include "sfr/model.hpp"
#include "sfr/types.hpp"

namespace sfr {

// State-space realization of the aggregate model. State x = (delta_f, z) with
// the lead-lag realized as feedthrough plus one lag state:
//   u  = -delta_f / r_g
//   pm = (t_1/t_g) u + (1 - t_1/t_g) z
//   z' = (u - z) / t_g
//   delta_f' = (pm + delta_p_d + p_ffr1(t) - d_sigma delta_f) / (2 h_sigma)
// At t_1 = 0 this reduces to a pure first-order lag.
struct SfrStateSpace {
  double inv_r_g, feed, lag_gain, inv_t_g, d_sigma, inv_2h;

  explicit SfrStateSpace(const AggregateSfr& agg)
      : inv_r_g(1.0 / agg.r_g),
        feed(agg.t_1 / agg.t_g),
        lag_gain(1.0 - agg.t_1 / agg.t_g),
        inv_t_g(1.0 / agg.t_g),
        d_sigma(agg.d_sigma),
        inv_2h(1.0 / (2.0 * agg.h_sigma)) {}

  double governor_output(const std::array<double, 2>& x) const {
    return feed * (-inv_r_g * x[0]) + lag_gain * x[1];
  }

  std::array<double, 2> rhs(const std::array<double, 2>& x, double input) const {
    const double u = -inv_r_g * x[0];
    const double pm = feed * u + lag_gain * x[1];
    return {(pm + input - d_sigma * x[0]) * inv_2h, (u - x[1]) * inv_t_g};
  }
};

// Linear part of the state space as a row-major 2x2 matrix; its eigenvalues
// must match -zeta w_n +/- j w_d from characteristics().
inline std::array<double, 4> state_matrix(const AggregateSfr& agg) {
  const SfrStateSpace ss(agg);
  return {-(ss.d_sigma + ss.feed * ss.inv_r_g) * ss.inv_2h, ss.lag_gain * ss.inv_2h,
          -ss.inv_r_g * ss.inv_t_g, -ss.inv_t_g};
}

struct Trajectory {
  double dt = 0.0;
  std::vector<double> t;
  std::vector<double> delta_f;   // p.u.
  std::vector<double> p_m;       // governor output, p.u.
  std::vector<double> p_ffr1;    // step FFR, p.u.
  std::vector<double> p_ffr2;    // reconstructed droop FFR, p.u.
  std::vector<double> p_ffr3;    // reconstructed synthetic-inertia FFR, p.u.

  std::size_t size() const { return t.size(); }
};

namespace detail {

inline void rk4_step(const SfrStateSpace& ss, const StepFfr& ffr, double dist,
                     std::array<double, 2>& x, double t, double h) {
  const auto input = [&](double time) { return dist + step_power_at(ffr, time); };
  const auto k1 = ss.rhs(x, input(t));
  const auto k2 = ss.rhs({x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1]},
                         input(t + 0.5 * h));
  const auto k3 = ss.rhs({x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1]},
                         input(t + 0.5 * h));
  const auto k4 = ss.rhs({x[0] + h * k3[0], x[1] + h * k3[1]}, input(t + h));
  x[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
  x[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
}

}  // namespace detail

// Classic fixed-step 4th-order integration of the aggregate model. The ramp
// input is evaluated exactly at stage times; any step straddling one of the
// ramp kinks (t_1, t_2) is split at the kink so the integrator never crosses a
// non-smooth input time mid-step, preserving 4th order. `split` only feeds the
// reconstructed per-FFR report columns.
inline Trajectory integrate(const AggregateSfr& agg, const StepFfr& step,
                            const Disturbance& dist, double dt, double horizon,
                            const FfrSplit& split = {}) {
  validate(agg);
  validate(step);
  if (!(dt > 0.0) || !(horizon > 0.0))
    throw Error(ErrorCode::NonPositiveParameter, "dt and horizon must be > 0");
  if (step.p_sus > 0.0 && dt > step.t_2 - step.t_1)
    throw Error(ErrorCode::StepTooLarge, "dt must be <= t_2 - t_1");
  if (dt > agg.t_g / 100.0)
    throw Error(ErrorCode::StepTooLarge, "dt must be <= t_g / 100");

  const SfrStateSpace ss(agg);
  const std::size_t n = static_cast<std::size_t>(std::llround(horizon / dt));

  Trajectory traj;
  traj.dt = dt;
  traj.t.reserve(n + 1);
  traj.delta_f.reserve(n + 1);
  traj.p_m.reserve(n + 1);
  traj.p_ffr1.reserve(n + 1);
  traj.p_ffr2.reserve(n + 1);
  traj.p_ffr3.reserve(n + 1);

  std::array<double, 2> x{0.0, 0.0};
  const double kinks[2] = {step.t_1, step.t_2};
  const bool has_kinks = step.p_sus > 0.0;
  const double tol = 1e-9 * dt;

  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * dt;
    if (!std::isfinite(x[0]) || !std::isfinite(x[1]))
      throw Error(ErrorCode::NonFinite, "state diverged at t = " + std::to_string(t));

    const double pffr1 = step_power_at(step, t);
    const double dfdt = ss.rhs(x, dist.delta_p_d + pffr1)[0];
    traj.t.push_back(t);
    traj.delta_f.push_back(x[0]);
    traj.p_m.push_back(ss.governor_output(x));
    traj.p_ffr1.push_back(pffr1);
    traj.p_ffr2.push_back(-split.r_ibr_inv * x[0]);
    traj.p_ffr3.push_back(-2.0 * split.h_ibr * dfdt);
    if (i == n) break;

    double t0 = t;
    const double t1 = t + dt;
    if (has_kinks) {
      for (double k : kinks) {
        if (k > t0 + tol && k < t1 - tol) {
          detail::rk4_step(ss, step, dist.delta_p_d, x, t0, k - t0);
          t0 = k;
        }
      }
    }
    detail::rk4_step(ss, step, dist.delta_p_d, x, t0, t1 - t0);
  }
  return traj;
}

// Grid argmin refined by a quadratic through the three samples around the
// minimum. NoDip when the trace is flat or never falls below its start.
inline NadirReport extract_nadir(const Trajectory& traj, double f_n) {
  if (traj.size() == 0)
    throw Error(ErrorCode::NonPositiveParameter, "empty trajectory");
  std::size_t idx = 0;
  for (std::size_t i = 1; i < traj.size(); ++i)
    if (traj.delta_f[i] < traj.delta_f[idx]) idx = i;
  if (idx == 0 || !(traj.delta_f[idx] < traj.delta_f.front()))
    throw Error(ErrorCode::NoDip, "trajectory has no interior minimum");

  double t_min = traj.t[idx];
  double df_min = traj.delta_f[idx];
  if (idx + 1 < traj.size()) {
    const double fm = traj.delta_f[idx - 1], f0 = traj.delta_f[idx],
                 fp = traj.delta_f[idx + 1];
    const double curvature = fm - 2.0 * f0 + fp;
    if (curvature > 0.0) {
      t_min = traj.t[idx] + 0.5 * traj.dt * (fm - fp) / curvature;
      df_min = f0 - (fm - fp) * (fm - fp) / (8.0 * curvature);
    }
  }

  double rocof = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i)
    rocof = std::max(rocof,
                     std::abs(traj.delta_f[i] - traj.delta_f[i - 1]) / traj.dt);

  NadirReport rep;
  rep.method = SolveMethod::Oracle;
  rep.f_nadir = f_n * (1.0 + df_min);
  rep.t_nadir = t_min;
  rep.delta_f_ss = traj.delta_f.back();
  rep.max_rocof = f_n * rocof;
  rep.ufls_margin = std::nan("");
  return rep;
}

}  // namespace sfr

#endif  // SFR_RK4_HPP
