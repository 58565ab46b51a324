#ifndef SFR_TYPES_HPP
#define SFR_TYPES_HPP

#include <optional>
#include <string>

namespace sfr {

// Synchronous-generator parameters on the unit's own base.
// h_g [s], d_g [p.u./p.u.], r_g [p.u.] droop, (t_1, t_g) [s] governor lead-lag.
struct SgParams {
  double h_g = 0.0;
  double d_g = 0.0;
  double r_g = 0.0;
  double t_1 = 0.0;
  double t_g = 0.0;
};

// Step response: zero until t_1, linear ramp to p_sus at t_2, sustained after.
struct StepFfr {
  double p_sus = 0.0;  // p.u.
  double t_1 = 0.0;    // s
  double t_2 = 1.0;    // s, strictly > t_1
};

// Droop response: injected power = -delta_f / r_ibr.
struct ProportionalFfr {
  double r_ibr = 0.0;  // p.u.
};

// Synthetic inertia: injected power = -2 * h_ibr * d(delta_f)/dt.
struct DerivativeFfr {
  double h_ibr = 0.0;  // s
};

struct FfrPortfolio {
  std::optional<StepFfr> step;
  std::optional<ProportionalFfr> proportional;
  std::optional<DerivativeFfr> derivative;

  bool empty() const {
    return !step.has_value() && !proportional.has_value() && !derivative.has_value();
  }
};

enum class UnitKind { SynchronousGenerator, InverterResource };

struct UnitRecord {
  std::string id;
  UnitKind kind = UnitKind::SynchronousGenerator;
  double rating = 0.0;  // MVA
  std::optional<SgParams> sg_params;
  std::optional<FfrPortfolio> ffr;
};

// Single-machine equivalent on the system base. Droop/derivative FFR is
// already absorbed into d_sigma/h_sigma; step FFR stays an exogenous input.
struct AggregateSfr {
  double h_sigma = 0.0;  // s
  double d_sigma = 0.0;  // p.u./p.u.
  double r_g = 0.0;      // p.u.
  double t_1 = 0.0;      // s
  double t_g = 0.0;      // s
  double f_n = 60.0;     // Hz
  double s_base = 0.0;   // MVA
};

struct SecondOrderCharacteristics {
  double zeta = 0.0;     // damping ratio, (0, 1) in the underdamped regime
  double omega_n = 0.0;  // rad/s
  double omega_d = 0.0;  // rad/s, omega_n * sqrt(1 - zeta^2)
  double phi = 0.0;      // rad, cos(phi) = zeta
};

struct Disturbance {
  double delta_p_d = 0.0;  // p.u. on s_base, negative for generation loss
  std::string label;
};

enum class SolveMethod { Analytic, Oracle };

struct NadirReport {
  double f_nadir = 0.0;      // Hz
  double t_nadir = 0.0;      // s
  double delta_f_ss = 0.0;   // p.u.
  double max_rocof = 0.0;    // Hz/s, magnitude
  double ufls_margin = 0.0;  // Hz; f_nadir - threshold, NaN when no threshold given
  SolveMethod method = SolveMethod::Analytic;
  // Nadir from the one-shot direct formula (single-sinusoid form); carried as a
  // cross-check next to the canonical residue-path value. Absent when the
  // sinusoid form does not apply (e.g. t_nadir <= t_2).
  std::optional<double> f_nadir_direct_formula;
};

}  // namespace sfr

#endif  // SFR_TYPES_HPP
