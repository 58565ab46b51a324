#ifndef SFR_ANALYTIC_HPP
#define SFR_ANALYTIC_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "sfr/errors.hpp"
#include "sfr/ffr.hpp"
#include "sfr/model.hpp"
#include "sfr/types.hpp"

namespace sfr {

// One inverse-transform term of (n0 + n1 s)/(s^2 + 2 zeta w_n s + w_n^2) driven
// by c * e^{-delay s} / s^order. For t >= delay, tau = t - delay:
//   value = poly0 + poly1 * tau + 2 Re(residue * e^{p tau})
// with p the upper complex pole. Input magnitude c is folded into the
// coefficients.
struct ModalTerm {
  double delay = 0.0;
  double poly0 = 0.0;
  double poly1 = 0.0;
  std::complex<double> residue;
};

// Single-sinusoid coefficients for the post-ramp (t > t_2) segment, computed
// verbatim from the printed one-shot nadir formulas. Kept separate from the
// residue path on purpose: the two disagree whenever the printed radical does,
// and the acceptance suite reports the observed discrepancy rate.
struct DirectFormulaCoefficients {
  double m0 = 0.0;         // m(0)
  double m_quarter = 0.0;  // m(pi / (2 w_d))
  double amplitude = 0.0;  // M
  double alpha = 0.0;      // rad
  double beta = 0.0;       // rad
  double radical = 0.0;    // w_n^2 - 2 zeta / T_g + 1 / T_g^2, as printed
  double prefactor = 0.0;  // sqrt(radical) / (2 H w_n^2 w_d (t_2 - t_1))
  bool applicable = false; // radical > 0 and arcsin arguments in domain
};

struct ClosedFormSolution {
  AggregateSfr agg;
  StepFfr step;
  Disturbance dist;
  SecondOrderCharacteristics chars;

  std::complex<double> pole;         // -zeta w_n + j w_d
  double sigma = 0.0;                // zeta * w_n
  double steady_state = 0.0;         // (p_sus + delta_p_d) / (d_sigma + 1/r_g)
  double t_tail = 0.0;               // last input onset (t_2 when ramps present)
  std::vector<ModalTerm> terms;      // frequency-deviation response
  std::vector<ModalTerm> gov_terms;  // governor-output response
  std::complex<double> tail_amplitude;  // W: delta_f - ss = 2 Re(W e^{p t}), t >= t_tail
  double alpha_canonical = 0.0;      // residue-derived sinusoid phase for the tail

  // Printed-formula coefficients; m_amplitude/alpha/beta as one-shot constants.
  DirectFormulaCoefficients direct;

  bool zero_input() const { return terms.empty(); }
};

namespace detail {

inline void append_term(std::vector<ModalTerm>& terms, double n0, double n1, double c,
                        double delay, int order, std::complex<double> p, double omega_n,
                        double omega_d, double sigma) {
  if (c == 0.0) return;
  const double wn2 = omega_n * omega_n;
  const std::complex<double> num = c * (n0 + n1 * p);
  const std::complex<double> two_j_wd(0.0, 2.0 * omega_d);
  ModalTerm term;
  term.delay = delay;
  if (order == 1) {
    term.residue = num / (two_j_wd * p);
    term.poly0 = c * n0 / wn2;
    term.poly1 = 0.0;
  } else {
    term.residue = num / (two_j_wd * p * p);
    term.poly0 = c * (n1 / wn2 - 2.0 * sigma * n0 / (wn2 * wn2));
    term.poly1 = c * n0 / wn2;
  }
  terms.push_back(term);
}

inline double eval_terms(const std::vector<ModalTerm>& terms, std::complex<double> p,
                         double t) {
  double v = 0.0;
  for (const ModalTerm& term : terms) {
    const double tau = t - term.delay;
    if (tau < 0.0) continue;
    v += term.poly0 + term.poly1 * tau +
         2.0 * std::real(term.residue * std::exp(p * tau));
  }
  return v;
}

inline double eval_terms_derivative(const std::vector<ModalTerm>& terms,
                                    std::complex<double> p, double t) {
  double v = 0.0;
  for (const ModalTerm& term : terms) {
    const double tau = t - term.delay;
    if (tau < 0.0) continue;
    v += term.poly1 + 2.0 * std::real(term.residue * p * std::exp(p * tau));
  }
  return v;
}

inline double eval_terms_second_derivative(const std::vector<ModalTerm>& terms,
                                           std::complex<double> p, double t) {
  double v = 0.0;
  for (const ModalTerm& term : terms) {
    const double tau = t - term.delay;
    if (tau < 0.0) continue;
    v += 2.0 * std::real(term.residue * p * p * std::exp(p * tau));
  }
  return v;
}

}  // namespace detail

// Exact frequency deviation [p.u.] at time t >= 0.
inline double evaluate(const ClosedFormSolution& sol, double t) {
  return detail::eval_terms(sol.terms, sol.pole, t);
}

// Exact d(delta_f)/dt [p.u./s] at time t >= 0.
inline double evaluate_derivative(const ClosedFormSolution& sol, double t) {
  return detail::eval_terms_derivative(sol.terms, sol.pole, t);
}

inline double evaluate_second_derivative(const ClosedFormSolution& sol, double t) {
  return detail::eval_terms_second_derivative(sol.terms, sol.pole, t);
}

// Exact governor output delta_P_m [p.u.] at time t >= 0, from its own
// closed-form expansion (not reconstructed from delta_f).
inline double governor_output(const ClosedFormSolution& sol, double t) {
  return detail::eval_terms(sol.gov_terms, sol.pole, t);
}

// Printed one-shot coefficients M, alpha, beta and the m(.) samples they are
// built from. Throws DegenerateAmplitude when M = 0 (no oscillatory part).
inline DirectFormulaCoefficients direct_formula_coefficients(
    const AggregateSfr& agg, const StepFfr& step, const Disturbance& dist,
    const SecondOrderCharacteristics& chars) {
  validate(step);
  const double sigma = chars.zeta * chars.omega_n;
  const double wd = chars.omega_d;
  const double inv_tg = 1.0 / agg.t_g;

  DirectFormulaCoefficients d;
  d.radical = chars.omega_n * chars.omega_n - 2.0 * chars.zeta * inv_tg + inv_tg * inv_tg;

  const auto m = [&](double t, double beta) {
    return step.p_sus * std::exp(sigma * step.t_2) *
               std::sin(wd * (t - step.t_2) - beta - chars.phi) -
           step.p_sus * std::exp(sigma * step.t_1) *
               std::sin(wd * (t - step.t_1) - beta - chars.phi) +
           dist.delta_p_d * chars.omega_n * (step.t_2 - step.t_1) *
               std::sin(wd * t - beta);
  };

  if (d.radical > 0.0) {
    const double beta_arg =
        inv_tg * std::sqrt(1.0 - chars.zeta * chars.zeta) / std::sqrt(d.radical);
    if (beta_arg >= -1.0 && beta_arg <= 1.0) {
      d.beta = std::asin(beta_arg);
      d.m0 = m(0.0, d.beta);
      d.m_quarter = m(M_PI / (2.0 * wd), d.beta);
      d.amplitude = std::hypot(d.m0, d.m_quarter);
      if (d.amplitude == 0.0)
        throw Error(ErrorCode::DegenerateAmplitude, "M = 0: no oscillatory component");
      d.alpha = M_PI - std::asin(d.m0 / d.amplitude);
      d.prefactor = std::sqrt(d.radical) /
                    (2.0 * agg.h_sigma * chars.omega_n * chars.omega_n * wd *
                     (step.t_2 - step.t_1));
      d.applicable = true;
    }
  }
  return d;
}

// Printed closed-form delta_f(t) [p.u.] for t > t_2, from the one-shot
// coefficients. Meaningful only where `direct.applicable`.
inline double direct_formula_delta_f(const ClosedFormSolution& sol, double t) {
  const DirectFormulaCoefficients& d = sol.direct;
  return sol.steady_state + d.prefactor * std::exp(-sol.sigma * t) * d.amplitude *
                                std::sin(sol.chars.omega_d * t + d.alpha);
}

// Printed nadir-time candidate (pi + phi - alpha) / w_d.
inline double direct_formula_t_nadir(const ClosedFormSolution& sol) {
  return (M_PI + sol.chars.phi - sol.direct.alpha) / sol.chars.omega_d;
}

// Printed one-shot nadir deviation [p.u.]: steady-state term minus
// T_g R_g^{-1/2} M e^{(alpha - phi - pi) cot phi} / ((t_2-t_1)(D + 1/R_g)^{3/2}).
inline double direct_formula_nadir_deviation(const ClosedFormSolution& sol) {
  const DirectFormulaCoefficients& d = sol.direct;
  const double cot_phi = sol.chars.zeta / std::sqrt(1.0 - sol.chars.zeta * sol.chars.zeta);
  const double denom = sol.agg.d_sigma + 1.0 / sol.agg.r_g;
  return sol.steady_state -
         sol.agg.t_g / std::sqrt(sol.agg.r_g) * d.amplitude *
             std::exp((d.alpha - sol.chars.phi - M_PI) * cot_phi) /
             ((sol.step.t_2 - sol.step.t_1) * std::pow(denom, 1.5));
}

// Builds the exact piecewise-analytic trajectory for the aggregate model with
// step-FFR and disturbance inputs, by residue expansion of each delayed input
// term. Requires the underdamped regime; a guard band around zeta = 1 is also
// rejected because the repeated-pole limit is numerically useless here.
inline ClosedFormSolution solve(const AggregateSfr& agg, const StepFfr& step,
                                const Disturbance& dist) {
  ClosedFormSolution sol;
  sol.agg = agg;
  sol.step = step;
  sol.dist = dist;
  sol.chars = characteristics(agg);
  if (std::abs(sol.chars.zeta - 1.0) < 1e-3)
    throw Error(ErrorCode::Overdamped,
                "zeta within 1e-3 of critical damping; use the ODE solver");

  sol.sigma = sol.chars.zeta * sol.chars.omega_n;
  sol.pole = {-sol.sigma, sol.chars.omega_d};
  sol.steady_state =
      (step.p_sus + dist.delta_p_d) / (agg.d_sigma + 1.0 / agg.r_g);

  const InputDecomposition dec = decompose_input(step, dist);
  const double two_h = 2.0 * agg.h_sigma;
  const double a = 1.0 / agg.t_g;
  // delta_f numerator: (s + 1/T_g) / (2 H)
  const double fn0 = a / two_h, fn1 = 1.0 / two_h;
  // delta_P_m numerator: -(1 + T_1 s) / (R_g T_g 2 H)
  const double gscale = -1.0 / (agg.r_g * agg.t_g * two_h);
  const double gn0 = gscale, gn1 = gscale * agg.t_1;

  for (const DelayedStepInput& s : dec.step_terms) {
    detail::append_term(sol.terms, fn0, fn1, s.magnitude, s.delay, 1, sol.pole,
                        sol.chars.omega_n, sol.chars.omega_d, sol.sigma);
    detail::append_term(sol.gov_terms, gn0, gn1, s.magnitude, s.delay, 1, sol.pole,
                        sol.chars.omega_n, sol.chars.omega_d, sol.sigma);
    if (s.magnitude != 0.0) sol.t_tail = std::max(sol.t_tail, s.delay);
  }
  for (const DelayedRampInput& r : dec.ramp_terms) {
    detail::append_term(sol.terms, fn0, fn1, r.gain, r.delay, 2, sol.pole,
                        sol.chars.omega_n, sol.chars.omega_d, sol.sigma);
    detail::append_term(sol.gov_terms, gn0, gn1, r.gain, r.delay, 2, sol.pole,
                        sol.chars.omega_n, sol.chars.omega_d, sol.sigma);
    if (r.gain != 0.0) sol.t_tail = std::max(sol.t_tail, r.delay);
  }

  sol.tail_amplitude = {0.0, 0.0};
  for (const ModalTerm& term : sol.terms)
    sol.tail_amplitude += term.residue * std::exp(-sol.pole * term.delay);
  sol.alpha_canonical = std::arg(sol.tail_amplitude) + M_PI / 2.0;

  if (!sol.zero_input()) {
    try {
      sol.direct = direct_formula_coefficients(agg, step, dist, sol.chars);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateAmplitude) throw;
    }
  }
  return sol;
}

// delta_f sampled on the uniform grid t = i * dt, i in [0, n). Uses a per-term
// phasor recurrence with periodic resync; equivalent to calling evaluate()
// pointwise but much cheaper for long grids.
inline std::vector<double> evaluate_on_grid(const ClosedFormSolution& sol, double dt,
                                            std::size_t n) {
  std::vector<double> out(n, 0.0);
  const std::complex<double> step_factor = std::exp(sol.pole * dt);
  for (const ModalTerm& term : sol.terms) {
    std::size_t i0 = static_cast<std::size_t>(
        std::max(0.0, std::ceil(term.delay / dt - 1e-9)));
    if (i0 >= n) continue;
    double tau0 = static_cast<double>(i0) * dt - term.delay;
    if (tau0 < 0.0) tau0 = 0.0;
    std::complex<double> phasor = term.residue * std::exp(sol.pole * tau0);
    for (std::size_t i = i0; i < n; ++i) {
      const double tau = static_cast<double>(i - i0) * dt + tau0;
      out[i] += term.poly0 + term.poly1 * tau + 2.0 * std::real(phasor);
      if (((i - i0) & 0xFFF) == 0xFFF)
        phasor = term.residue * std::exp(sol.pole * (tau + dt));
      else
        phasor *= step_factor;
    }
  }
  return out;
}

struct NadirPoint {
  double t = 0.0;
  double delta_f = 0.0;  // p.u.
  bool primary = false;  // true when the tail single-sinusoid candidate won
};

namespace detail {

inline double refine_derivative_root(const ClosedFormSolution& sol, double lo,
                                     double hi) {
  double flo = evaluate_derivative(sol, lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo < 1e-14 * std::max(1.0, hi)) return mid;
    const double fm = evaluate_derivative(sol, mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline void scan_segment(const ClosedFormSolution& sol, double a, double b,
                         std::vector<double>& roots) {
  if (!(b > a)) return;
  const int n = std::max(
      8, static_cast<int>(std::ceil((b - a) * sol.chars.omega_d / 0.2)));
  double t_prev = a;
  double f_prev = evaluate_derivative(sol, t_prev);
  for (int i = 1; i <= n; ++i) {
    const double t = a + (b - a) * static_cast<double>(i) / n;
    const double f = evaluate_derivative(sol, t);
    if (f_prev == 0.0)
      roots.push_back(t_prev);
    else if ((f < 0.0) != (f_prev < 0.0))
      roots.push_back(refine_derivative_root(sol, t_prev, t));
    t_prev = t;
    f_prev = f;
  }
}

}  // namespace detail

// Time and depth of the global minimum of delta_f over t >= 0. The tail
// (t >= t_2) stationary points come in closed form from the combined sinusoid
// phase; the ramp segments are scanned and refined numerically. NoDip when the
// trajectory never goes below zero.
inline NadirPoint nadir_time(const ClosedFormSolution& sol) {
  if (sol.zero_input())
    throw Error(ErrorCode::NoDip, "zero input: delta_f is identically zero");

  struct Candidate {
    double t, df;
    bool tail;
  };
  std::vector<Candidate> minima;

  // Ramp segments before the tail.
  std::vector<double> breaks{0.0};
  for (const ModalTerm& term : sol.terms)
    if (term.delay > 0.0) breaks.push_back(term.delay);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
    detail::scan_segment(sol, breaks[i], breaks[i + 1], roots);
  for (double r : roots)
    if (r > 0.0 && evaluate_second_derivative(sol, r) > 0.0)
      minima.push_back({r, evaluate(sol, r), false});

  // Tail: derivative = 2 |W p| e^{-sigma t} cos(w_d t + theta).
  const std::complex<double> wp = sol.tail_amplitude * sol.pole;
  if (std::abs(wp) > 0.0) {
    const double theta = std::arg(wp);
    const double wd = sol.chars.omega_d;
    double k0 = std::ceil((wd * sol.t_tail + theta - M_PI / 2.0) / M_PI);
    bool first_tail = true;
    for (int j = 0; j < 6; ++j) {
      const double t = (M_PI / 2.0 + (k0 + j) * M_PI - theta) / wd;
      if (t <= sol.t_tail) continue;
      if (evaluate_second_derivative(sol, t) > 0.0) {
        minima.push_back({t, evaluate(sol, t), first_tail});
        first_tail = false;
      }
    }
  }

  if (minima.empty())
    throw Error(ErrorCode::NoDip, "no interior stationary minimum");
  const auto best = std::min_element(
      minima.begin(), minima.end(),
      [](const Candidate& a, const Candidate& b) { return a.df < b.df; });
  if (!(best->df < 0.0))
    throw Error(ErrorCode::NoDip, "delta_f never drops below zero");
  return {best->t, best->df, best->tail && best->t > sol.step.t_2};
}

// Maximum |d f / d t| in p.u./s over a dense grid plus the t = 0+ value.
inline double max_rocof_pu(const ClosedFormSolution& sol, double t_end) {
  const double h = std::min(0.01, M_PI / (50.0 * sol.chars.omega_d));
  double best = std::abs(sol.dist.delta_p_d / (2.0 * sol.agg.h_sigma));
  const std::size_t n = static_cast<std::size_t>(std::ceil(t_end / h));
  for (std::size_t i = 0; i <= n; ++i)
    best = std::max(best, std::abs(evaluate_derivative(sol, i * h)));
  return best;
}

// Full analytic nadir report in Hz (f = f_n (1 + delta_f)). The UFLS margin is
// left NaN; the caller compares against its own threshold.
inline NadirReport nadir_frequency(const ClosedFormSolution& sol, double f_n) {
  NadirReport rep;
  rep.method = SolveMethod::Analytic;
  rep.ufls_margin = std::nan("");
  if (sol.zero_input()) {
    rep.f_nadir = f_n;
    rep.t_nadir = 0.0;
    rep.delta_f_ss = 0.0;
    rep.max_rocof = 0.0;
    return rep;
  }
  const NadirPoint np = nadir_time(sol);
  rep.t_nadir = np.t;
  rep.f_nadir = f_n * (1.0 + np.delta_f);
  rep.delta_f_ss = sol.steady_state;
  const double t_end =
      std::max(np.t, sol.step.t_2) + 2.0 * M_PI / sol.chars.omega_d;
  rep.max_rocof = f_n * max_rocof_pu(sol, t_end);
  if (sol.direct.applicable && np.t > sol.step.t_2)
    rep.f_nadir_direct_formula = f_n * (1.0 + direct_formula_nadir_deviation(sol));
  return rep;
}

}  // namespace sfr

#endif  // SFR_ANALYTIC_HPP
