#ifndef SFR_SCENARIO_HPP
#define SFR_SCENARIO_HPP

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "sfr/analytic.hpp"
#include "sfr/errors.hpp"
#include "sfr/model.hpp"
#include "sfr/rk4.hpp"
#include "sfr/types.hpp"

namespace sfr {

using json = nlohmann::json;

inline constexpr int kScenarioSchemaVersion = 1;
inline constexpr double kDefaultOracleDt = 1e-4;
inline constexpr double kDefaultHorizon = 60.0;

enum class SolverChoice { Analytic, Oracle, Both };

struct ScenarioFile {
  std::vector<UnitRecord> fleet;
  double s_base = 0.0;
  double f_n = 60.0;
  std::vector<Disturbance> disturbances;
  double ufls_threshold = 0.0;  // Hz
  SolverChoice solver = SolverChoice::Analytic;
  std::optional<double> oracle_dt;
  std::optional<double> horizon;

  double dt() const { return oracle_dt.value_or(kDefaultOracleDt); }
  double t_end() const { return horizon.value_or(kDefaultHorizon); }
};

namespace detail {

inline Error schema_error(const std::string& path, const std::string& what) {
  return Error(ErrorCode::InvalidScenario, path + ": " + what);
}

inline const json& require_field(const json& j, const std::string& path,
                                 const char* key) {
  if (!j.is_object()) throw schema_error(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw schema_error(path + "." + key, "missing required field");
  return *it;
}

inline double require_number(const json& j, const std::string& path, const char* key) {
  const json& v = require_field(j, path, key);
  if (!v.is_number()) throw schema_error(path + "." + key, "expected a number");
  return v.get<double>();
}

inline double optional_number(const json& j, const std::string& path, const char* key,
                              double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j[key].is_number()) throw schema_error(path + "." + key, "expected a number");
  return j[key].get<double>();
}

inline std::string require_string(const json& j, const std::string& path,
                                  const char* key) {
  const json& v = require_field(j, path, key);
  if (!v.is_string()) throw schema_error(path + "." + key, "expected a string");
  return v.get<std::string>();
}

}  // namespace detail

inline UnitRecord parse_unit(const json& j, const std::string& path) {
  using detail::require_number;
  using detail::require_string;
  UnitRecord unit;
  unit.id = require_string(j, path, "id");
  const std::string kind = require_string(j, path, "kind");
  if (kind == "SynchronousGenerator")
    unit.kind = UnitKind::SynchronousGenerator;
  else if (kind == "InverterResource")
    unit.kind = UnitKind::InverterResource;
  else
    throw detail::schema_error(
        path + ".kind", "expected SynchronousGenerator or InverterResource");
  unit.rating = require_number(j, path, "rating");

  if (j.contains("sg_params")) {
    const std::string p = path + ".sg_params";
    const json& sg = j["sg_params"];
    SgParams params;
    params.h_g = require_number(sg, p, "h_g");
    params.d_g = require_number(sg, p, "d_g");
    params.r_g = require_number(sg, p, "r_g");
    params.t_1 = require_number(sg, p, "t_1");
    params.t_g = require_number(sg, p, "t_g");
    unit.sg_params = params;
  }
  if (j.contains("ffr")) {
    const std::string p = path + ".ffr";
    const json& f = j["ffr"];
    if (!f.is_object()) throw detail::schema_error(p, "expected an object");
    FfrPortfolio portfolio;
    if (f.contains("step")) {
      const std::string ps = p + ".step";
      StepFfr s;
      s.p_sus = require_number(f["step"], ps, "p_sus");
      s.t_1 = require_number(f["step"], ps, "t_1");
      s.t_2 = require_number(f["step"], ps, "t_2");
      portfolio.step = s;
    }
    if (f.contains("proportional"))
      portfolio.proportional =
          ProportionalFfr{require_number(f["proportional"], p + ".proportional", "r_ibr")};
    if (f.contains("derivative"))
      portfolio.derivative =
          DerivativeFfr{require_number(f["derivative"], p + ".derivative", "h_ibr")};
    unit.ffr = portfolio;
  }
  try {
    validate(unit);
  } catch (const Error& e) {
    throw detail::schema_error(path, e.what());
  }
  return unit;
}

inline ScenarioFile parse_scenario(const json& j) {
  using detail::require_field;
  using detail::require_number;
  const std::string root = "scenario";
  const json& version = require_field(j, root, "schema_version");
  if (!version.is_number_integer() || version.get<int>() != kScenarioSchemaVersion)
    throw detail::schema_error(root + ".schema_version",
                               "unsupported schema version (expected 1)");

  ScenarioFile sc;
  sc.s_base = require_number(j, root, "s_base");
  if (!(sc.s_base > 0.0))
    throw detail::schema_error(root + ".s_base", "must be > 0");
  sc.f_n = require_number(j, root, "f_n");
  if (!(sc.f_n > 0.0)) throw detail::schema_error(root + ".f_n", "must be > 0");

  const json& fleet = require_field(j, root, "fleet");
  if (!fleet.is_array() || fleet.empty())
    throw detail::schema_error(root + ".fleet", "expected a non-empty array");
  for (std::size_t i = 0; i < fleet.size(); ++i)
    sc.fleet.push_back(
        parse_unit(fleet[i], root + ".fleet[" + std::to_string(i) + "]"));

  const json& dists = require_field(j, root, "disturbances");
  if (!dists.is_array() || dists.empty())
    throw detail::schema_error(root + ".disturbances", "expected a non-empty array");
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const std::string p = root + ".disturbances[" + std::to_string(i) + "]";
    Disturbance d;
    d.delta_p_d = require_number(dists[i], p, "delta_p_d");
    d.label = dists[i].contains("label") ? dists[i]["label"].get<std::string>()
                                         : "disturbance-" + std::to_string(i);
    sc.disturbances.push_back(d);
  }

  sc.ufls_threshold = require_number(j, root, "ufls_threshold");
  if (!(sc.ufls_threshold < sc.f_n))
    throw detail::schema_error(root + ".ufls_threshold", "must be < f_n");

  if (j.contains("solver")) {
    const std::string s = detail::require_string(j, root, "solver");
    if (s == "analytic")
      sc.solver = SolverChoice::Analytic;
    else if (s == "oracle")
      sc.solver = SolverChoice::Oracle;
    else if (s == "both")
      sc.solver = SolverChoice::Both;
    else
      throw detail::schema_error(root + ".solver",
                                 "expected analytic, oracle or both");
  }
  if (j.contains("oracle_dt")) {
    sc.oracle_dt = detail::require_number(j, root, "oracle_dt");
    if (!(*sc.oracle_dt > 0.0))
      throw detail::schema_error(root + ".oracle_dt", "must be > 0");
  }
  if (j.contains("horizon")) {
    sc.horizon = detail::require_number(j, root, "horizon");
    if (!(*sc.horizon > 0.0))
      throw detail::schema_error(root + ".horizon", "must be > 0");
  }
  return sc;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::InvalidScenario, path + ": cannot open file");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidScenario, path + ": " + e.what());
  }
  return j;
}

inline ScenarioFile load_scenario(const std::string& path) {
  return parse_scenario(load_json_file(path));
}

struct DisturbanceResult {
  std::string label;
  std::string status = "ok";  // "ok", "NoDip", "Overdamped", ...
  std::optional<NadirReport> analytic;
  std::optional<NadirReport> oracle;
};

struct PredictRun {
  AggregateSfr agg;
  StepFfr step;
  FfrSplit split;
  std::vector<DisturbanceResult> results;
  std::vector<double> analytic_ms;  // per-disturbance analytic wall-clock
};

inline NadirReport trivial_report(double f_n, SolveMethod method) {
  NadirReport rep;
  rep.method = method;
  rep.f_nadir = f_n;
  rep.t_nadir = 0.0;
  rep.delta_f_ss = 0.0;
  rep.max_rocof = 0.0;
  rep.ufls_margin = std::nan("");
  return rep;
}

// Runs the prediction workflow: reduce the fleet, absorb droop/derivative FFR,
// then per disturbance solve analytically and/or integrate numerically.
inline PredictRun run_predict(const ScenarioFile& sc) {
  PredictRun run;
  run.agg = aggregate_fleet(sc.fleet, sc.s_base, sc.f_n);
  run.step = collect_step_ffr(sc.fleet, sc.s_base);
  run.split = absorbed_ffr_split(sc.fleet, sc.s_base);

  const bool want_analytic = sc.solver != SolverChoice::Oracle;
  const bool want_oracle = sc.solver != SolverChoice::Analytic;

  for (const Disturbance& dist : sc.disturbances) {
    DisturbanceResult res;
    res.label = dist.label;
    const bool zero_input = dist.delta_p_d == 0.0 && run.step.p_sus == 0.0;

    if (want_analytic) {
      const auto start = std::chrono::steady_clock::now();
      try {
        if (zero_input) {
          res.analytic = trivial_report(sc.f_n, SolveMethod::Analytic);
        } else {
          const ClosedFormSolution sol = solve(run.agg, run.step, dist);
          res.analytic = nadir_frequency(sol, sc.f_n);
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::Overdamped && sc.solver == SolverChoice::Analytic)
          throw;
        res.status = to_string(e.code());
      }
      const auto stop = std::chrono::steady_clock::now();
      run.analytic_ms.push_back(
          std::chrono::duration<double, std::milli>(stop - start).count());
    }

    if (want_oracle) {
      try {
        if (zero_input) {
          res.oracle = trivial_report(sc.f_n, SolveMethod::Oracle);
        } else {
          const Trajectory traj =
              integrate(run.agg, run.step, dist, sc.dt(), sc.t_end(), run.split);
          res.oracle = extract_nadir(traj, sc.f_n);
        }
      } catch (const Error& e) {
        res.status = to_string(e.code());
      }
    }

    for (auto* rep : {&res.analytic, &res.oracle})
      if (rep->has_value())
        (*rep)->ufls_margin = (*rep)->f_nadir - sc.ufls_threshold;
    run.results.push_back(std::move(res));
  }
  return run;
}

inline json report_json(const NadirReport& rep) {
  json j;
  j["f_nadir_hz"] = rep.f_nadir;
  j["t_nadir_s"] = rep.t_nadir;
  j["delta_f_ss_pu"] = rep.delta_f_ss;
  j["max_rocof_hz_per_s"] = rep.max_rocof;
  if (std::isfinite(rep.ufls_margin)) {
    j["ufls_margin_hz"] = rep.ufls_margin;
    j["ufls_pass"] = rep.ufls_margin >= 0.0;
  }
  if (rep.f_nadir_direct_formula)
    j["f_nadir_direct_formula_hz"] = *rep.f_nadir_direct_formula;
  return j;
}

// Machine-readable run report. The "timing" section is deliberately the only
// non-deterministic part; everything else is a pure function of the scenario.
inline json predict_report_json(const PredictRun& run, const json& scenario_echo) {
  json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["scenario"] = scenario_echo;
  j["aggregate"] = {{"h_sigma", run.agg.h_sigma}, {"d_sigma", run.agg.d_sigma},
                    {"r_g", run.agg.r_g},         {"t_1", run.agg.t_1},
                    {"t_g", run.agg.t_g},         {"f_n", run.agg.f_n},
                    {"s_base", run.agg.s_base}};
  j["step_ffr"] = {{"p_sus", run.step.p_sus}, {"t_1", run.step.t_1},
                   {"t_2", run.step.t_2}};
  j["results"] = json::array();
  for (const DisturbanceResult& res : run.results) {
    json r;
    r["label"] = res.label;
    r["status"] = res.status;
    if (res.analytic) r["analytic"] = report_json(*res.analytic);
    if (res.oracle) r["oracle"] = report_json(*res.oracle);
    if (res.analytic && res.oracle) {
      r["agreement"] = {
          {"f_nadir_abs_err_hz", std::abs(res.analytic->f_nadir - res.oracle->f_nadir)},
          {"t_nadir_abs_err_s", std::abs(res.analytic->t_nadir - res.oracle->t_nadir)}};
    }
    j["results"].push_back(std::move(r));
  }
  j["timing"] = {{"analytic_ms", run.analytic_ms}};
  return j;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// Trajectory CSV for the first (or named) disturbance: oracle columns plus the
// analytic deviation sampled on the same grid when the analytic path applies.
inline void write_trace_csv(std::ostream& out, const ScenarioFile& sc,
                            const std::string& label = "") {
  const AggregateSfr agg = aggregate_fleet(sc.fleet, sc.s_base, sc.f_n);
  const StepFfr step = collect_step_ffr(sc.fleet, sc.s_base);
  const FfrSplit split = absorbed_ffr_split(sc.fleet, sc.s_base);

  const Disturbance* dist = &sc.disturbances.front();
  if (!label.empty()) {
    dist = nullptr;
    for (const Disturbance& d : sc.disturbances)
      if (d.label == label) dist = &d;
    if (!dist)
      throw Error(ErrorCode::InvalidScenario, "no disturbance labeled '" + label + "'");
  }

  const Trajectory traj = integrate(agg, step, *dist, sc.dt(), sc.t_end(), split);

  std::vector<double> analytic;
  bool have_analytic = false;
  if (sc.solver != SolverChoice::Oracle) {
    try {
      const ClosedFormSolution sol = solve(agg, step, *dist);
      analytic = evaluate_on_grid(sol, traj.dt, traj.size());
      have_analytic = true;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Overdamped) throw;
      if (sc.solver == SolverChoice::Analytic) throw;
    }
  }

  out << "t,delta_f_pu,f_hz,p_m,p_ffr1,p_ffr2,p_ffr3";
  if (have_analytic) out << ",delta_f_analytic_pu,f_analytic_hz";
  out << "\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    using detail::fmt_double;
    out << fmt_double(traj.t[i]) << ',' << fmt_double(traj.delta_f[i]) << ','
        << fmt_double(sc.f_n * (1.0 + traj.delta_f[i])) << ','
        << fmt_double(traj.p_m[i]) << ',' << fmt_double(traj.p_ffr1[i]) << ','
        << fmt_double(traj.p_ffr2[i]) << ',' << fmt_double(traj.p_ffr3[i]);
    if (have_analytic)
      out << ',' << fmt_double(analytic[i]) << ','
          << fmt_double(sc.f_n * (1.0 + analytic[i]));
    out << "\n";
  }
}

enum class SweepParameter { DeltaPd, PSus, RIbr, HIbr, T2 };

struct SweepSpec {
  SweepParameter parameter = SweepParameter::DeltaPd;
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  std::string base_scenario;  // path, resolved by the caller
};

inline SweepSpec parse_sweep_spec(const json& j) {
  const std::string root = "sweep";
  const json& version = detail::require_field(j, root, "schema_version");
  if (!version.is_number_integer() || version.get<int>() != kScenarioSchemaVersion)
    throw detail::schema_error(root + ".schema_version",
                               "unsupported schema version (expected 1)");
  SweepSpec spec;
  const std::string p = detail::require_string(j, root, "parameter");
  if (p == "delta_p_d")
    spec.parameter = SweepParameter::DeltaPd;
  else if (p == "p_sus")
    spec.parameter = SweepParameter::PSus;
  else if (p == "r_ibr")
    spec.parameter = SweepParameter::RIbr;
  else if (p == "h_ibr")
    spec.parameter = SweepParameter::HIbr;
  else if (p == "t_2")
    spec.parameter = SweepParameter::T2;
  else
    throw detail::schema_error(root + ".parameter",
                               "expected one of delta_p_d, p_sus, r_ibr, h_ibr, t_2");
  const json& range = detail::require_field(j, root, "range");
  spec.start = detail::require_number(range, root + ".range", "start");
  spec.stop = detail::require_number(range, root + ".range", "stop");
  const json& count = detail::require_field(range, root + ".range", "count");
  if (!count.is_number_integer())
    throw detail::schema_error(root + ".range.count", "expected an integer");
  spec.count = count.get<int>();
  if (spec.count < 2)
    throw detail::schema_error(root + ".range.count", "must be >= 2");
  if (spec.start == spec.stop)
    throw detail::schema_error(root + ".range", "start must differ from stop");
  spec.base_scenario = detail::require_string(j, root, "base_scenario");
  return spec;
}

// Applies a sweep value to a copy of the base scenario. delta_p_d targets the
// first disturbance; the FFR parameters target every matching FFR member.
inline ScenarioFile apply_sweep_value(const ScenarioFile& base, SweepParameter param,
                                      double value) {
  ScenarioFile sc = base;
  switch (param) {
    case SweepParameter::DeltaPd:
      sc.disturbances.front().delta_p_d = value;
      break;
    case SweepParameter::PSus:
      for (UnitRecord& u : sc.fleet)
        if (u.ffr && u.ffr->step) u.ffr->step->p_sus = value;
      break;
    case SweepParameter::RIbr:
      for (UnitRecord& u : sc.fleet)
        if (u.ffr && u.ffr->proportional) u.ffr->proportional->r_ibr = value;
      break;
    case SweepParameter::HIbr:
      for (UnitRecord& u : sc.fleet)
        if (u.ffr && u.ffr->derivative) u.ffr->derivative->h_ibr = value;
      break;
    case SweepParameter::T2:
      for (UnitRecord& u : sc.fleet)
        if (u.ffr && u.ffr->step) u.ffr->step->t_2 = value;
      break;
  }
  return sc;
}

struct SweepRow {
  double value = 0.0;
  std::string status = "ok";
  double f_nadir = 0.0;
  double t_nadir = 0.0;
  double ufls_margin = 0.0;
};

// Evaluates the sweep grid; rows come back in parameter order regardless of
// which worker finished first. Per-row failures land in the status column.
inline std::vector<SweepRow> run_sweep(const SweepSpec& spec, const ScenarioFile& base,
                                       unsigned n_threads = 0) {
  std::vector<SweepRow> rows(static_cast<std::size_t>(spec.count));
  const auto eval_row = [&](int i) {
    SweepRow& row = rows[static_cast<std::size_t>(i)];
    row.value = spec.start +
                (spec.stop - spec.start) * static_cast<double>(i) / (spec.count - 1);
    try {
      ScenarioFile sc = apply_sweep_value(base, spec.parameter, row.value);
      sc.disturbances.resize(1);
      PredictRun run = run_predict(sc);
      const DisturbanceResult& res = run.results.front();
      const NadirReport* rep =
          res.analytic ? &*res.analytic : (res.oracle ? &*res.oracle : nullptr);
      if (!rep || res.status != "ok") {
        row.status = res.status;
        return;
      }
      row.f_nadir = rep->f_nadir;
      row.t_nadir = rep->t_nadir;
      row.ufls_margin = rep->ufls_margin;
    } catch (const Error& e) {
      row.status = to_string(e.code());
    }
  };

  if (n_threads == 0) n_threads = std::thread::hardware_concurrency();
  n_threads = std::max(1u, std::min<unsigned>(n_threads, rows.size()));
  if (n_threads == 1) {
    for (int i = 0; i < spec.count; ++i) eval_row(i);
  } else {
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < n_threads; ++w)
      workers.emplace_back([&, w] {
        for (int i = static_cast<int>(w); i < spec.count;
             i += static_cast<int>(n_threads))
          eval_row(i);
      });
    for (std::thread& worker : workers) worker.join();
  }
  return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "value,f_nadir_hz,t_nadir_s,ufls_margin_hz,status\n";
  for (const SweepRow& row : rows) {
    using detail::fmt_double;
    if (row.status == "ok")
      out << fmt_double(row.value) << ',' << fmt_double(row.f_nadir) << ','
          << fmt_double(row.t_nadir) << ',' << fmt_double(row.ufls_margin) << ",ok\n";
    else
      out << fmt_double(row.value) << ",,,," << row.status << "\n";
  }
}

}  // namespace sfr

#endif  // SFR_SCENARIO_HPP
