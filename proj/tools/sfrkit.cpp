// Command-line front end: frequency-nadir prediction, trajectory export,
// parameter sweeps and latency benchmarking for the aggregate SFR model.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "sfr/scenario.hpp"

namespace {

using sfr::Error;
using sfr::ErrorCode;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitRegime = 2;
constexpr int kExitInternal = 3;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::InvalidScenario:
    case ErrorCode::NonPositiveParameter:
    case ErrorCode::NoSynchronousGeneration:
    case ErrorCode::HeterogeneousStepTiming:
      return kExitInput;
    case ErrorCode::Overdamped:
    case ErrorCode::Undamped:
      return kExitRegime;
    default:
      return kExitInternal;
  }
}

struct CommonOpts {
  std::string scenario_path;
  std::string solver;
  double dt = 0.0;
  double horizon = 0.0;
  std::string out;
  bool quiet = false;
};

void apply_overrides(sfr::ScenarioFile& sc, const CommonOpts& opts) {
  if (!opts.solver.empty()) {
    if (opts.solver == "analytic")
      sc.solver = sfr::SolverChoice::Analytic;
    else if (opts.solver == "oracle")
      sc.solver = sfr::SolverChoice::Oracle;
    else
      sc.solver = sfr::SolverChoice::Both;
  }
  if (opts.dt > 0.0) sc.oracle_dt = opts.dt;
  if (opts.horizon > 0.0) sc.horizon = opts.horizon;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidScenario, path + ": cannot open for writing");
  out << body;
  if (!out) throw Error(ErrorCode::InvalidScenario, path + ": write failed");
}

void print_report_line(std::ostream& os, const char* tag, const sfr::NadirReport& rep) {
  os << "  " << tag << ": f_nadir = " << rep.f_nadir
     << " Hz at t = " << rep.t_nadir << " s, steady-state = " << rep.delta_f_ss
     << " p.u., max RoCoF = " << rep.max_rocof << " Hz/s";
  if (std::isfinite(rep.ufls_margin))
    os << ", UFLS margin = " << rep.ufls_margin << " Hz ["
       << (rep.ufls_margin >= 0.0 ? "pass" : "FAIL") << "]";
  os << "\n";
}

int cmd_predict(const CommonOpts& opts) {
  sfr::json raw = sfr::load_json_file(opts.scenario_path);
  sfr::ScenarioFile sc = sfr::parse_scenario(raw);
  apply_overrides(sc, opts);

  const sfr::PredictRun run = sfr::run_predict(sc);
  const sfr::json report = sfr::predict_report_json(run, raw);

  if (!opts.quiet) {
    std::cout << "scenario: " << opts.scenario_path << "\n";
    std::cout << "aggregate: H = " << run.agg.h_sigma << " s, D = " << run.agg.d_sigma
              << ", R_g = " << run.agg.r_g << ", T_1 = " << run.agg.t_1
              << " s, T_g = " << run.agg.t_g << " s\n";
    for (std::size_t i = 0; i < run.results.size(); ++i) {
      const sfr::DisturbanceResult& res = run.results[i];
      std::cout << res.label << " (status: " << res.status << ")\n";
      if (res.analytic) print_report_line(std::cout, "analytic", *res.analytic);
      if (res.oracle) print_report_line(std::cout, "oracle  ", *res.oracle);
      if (i < run.analytic_ms.size())
        std::cout << "  prediction time: " << run.analytic_ms[i] << " ms\n";
    }
  }
  if (!opts.out.empty()) write_text_file(opts.out, report.dump(2) + "\n");
  return kExitOk;
}

int cmd_trace(const CommonOpts& opts, const std::string& label) {
  sfr::ScenarioFile sc = sfr::load_scenario(opts.scenario_path);
  apply_overrides(sc, opts);
  std::ofstream out(opts.out, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::InvalidScenario, opts.out + ": cannot open for writing");
  sfr::write_trace_csv(out, sc, label);
  if (!out) throw Error(ErrorCode::InvalidScenario, opts.out + ": write failed");
  if (!opts.quiet) std::cout << "wrote " << opts.out << "\n";
  return kExitOk;
}

std::string resolve_relative(const std::string& base_file, const std::string& ref) {
  if (!ref.empty() && ref.front() == '/') return ref;
  const auto slash = base_file.find_last_of('/');
  if (slash == std::string::npos) return ref;
  return base_file.substr(0, slash + 1) + ref;
}

int cmd_sweep(const CommonOpts& opts, const std::string& spec_path) {
  const sfr::SweepSpec spec = sfr::parse_sweep_spec(sfr::load_json_file(spec_path));
  sfr::ScenarioFile base =
      sfr::load_scenario(resolve_relative(spec_path, spec.base_scenario));
  apply_overrides(base, opts);

  unsigned threads = 0;
  if (const char* env = std::getenv("SFR_SWEEP_THREADS"))
    threads = static_cast<unsigned>(std::max(0L, std::strtol(env, nullptr, 10)));

  const std::vector<sfr::SweepRow> rows = sfr::run_sweep(spec, base, threads);
  std::ofstream out(opts.out, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::InvalidScenario, opts.out + ": cannot open for writing");
  sfr::write_sweep_csv(out, rows);
  if (!opts.quiet)
    std::cout << "wrote " << rows.size() << " rows to " << opts.out << "\n";
  return kExitOk;
}

int cmd_bench(const CommonOpts& opts, int iterations) {
  sfr::ScenarioFile sc = sfr::load_scenario(opts.scenario_path);
  apply_overrides(sc, opts);
  const sfr::AggregateSfr agg = sfr::aggregate_fleet(sc.fleet, sc.s_base, sc.f_n);
  const sfr::StepFfr step = sfr::collect_step_ffr(sc.fleet, sc.s_base);
  const sfr::Disturbance dist = sc.disturbances.front();

  using clock = std::chrono::steady_clock;
  std::vector<double> samples_ms;
  samples_ms.reserve(static_cast<std::size_t>(iterations));
  double sink = 0.0;
  for (int i = 0; i < iterations; ++i) {
    const auto start = clock::now();
    const sfr::ClosedFormSolution sol = sfr::solve(agg, step, dist);
    const sfr::NadirPoint np = sfr::nadir_time(sol);
    sink += sc.f_n * (1.0 + np.delta_f);
    samples_ms.push_back(
        std::chrono::duration<double, std::milli>(clock::now() - start).count());
  }
  std::sort(samples_ms.begin(), samples_ms.end());
  const double median = samples_ms[samples_ms.size() / 2];
  const double p99 = samples_ms[static_cast<std::size_t>(
      std::min<double>(samples_ms.size() - 1, 0.99 * samples_ms.size()))];

  const auto start = clock::now();
  const sfr::Trajectory traj = sfr::integrate(agg, step, dist, sc.dt(), sc.t_end());
  const sfr::NadirReport oracle_rep = sfr::extract_nadir(traj, sc.f_n);
  const double oracle_ms =
      std::chrono::duration<double, std::milli>(clock::now() - start).count();

  std::cout << "analytic nadir evaluation over " << iterations << " iterations:\n"
            << "  median = " << median << " ms, p99 = " << p99 << " ms\n"
            << "oracle run (dt = " << sc.dt() << " s, horizon = " << sc.t_end()
            << " s): " << oracle_ms << " ms\n"
            << "speed-up (oracle / analytic median) = " << oracle_ms / median << "\n";
  if (!opts.quiet)
    std::cout << "(f_nadir analytic mean = " << sink / iterations
              << " Hz, oracle = " << oracle_rep.f_nadir << " Hz)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-security toolkit: analytic nadir prediction with an "
               "ODE cross-check"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string trace_label;
  std::string sweep_spec;
  int iterations = 1000;

  const auto add_common = [&](CLI::App* cmd, bool needs_scenario) {
    if (needs_scenario)
      cmd->add_option("scenario", opts.scenario_path, "scenario JSON file")
          ->required();
    cmd->add_option("--solver", opts.solver, "analytic|oracle|both")
        ->check(CLI::IsMember({"analytic", "oracle", "both"}));
    cmd->add_option("--dt", opts.dt, "oracle integration step [s]");
    cmd->add_option("--horizon", opts.horizon, "oracle horizon [s]");
    cmd->add_option("--out", opts.out, "output file path");
    cmd->add_flag("--quiet", opts.quiet, "suppress progress output");
  };

  CLI::App* predict = app.add_subcommand("predict", "predict post-contingency nadirs");
  add_common(predict, true);

  CLI::App* trace = app.add_subcommand("trace", "write the trajectory CSV");
  add_common(trace, true);
  trace->add_option("--label", trace_label, "disturbance label (default: first)");
  trace->get_option("--out")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep to CSV");
  sweep->add_option("spec", sweep_spec, "sweep spec JSON file")->required();
  add_common(sweep, false);
  sweep->get_option("--out")->required();

  CLI::App* bench = app.add_subcommand("bench", "measure prediction latency");
  add_common(bench, true);
  bench->add_option("--iterations", iterations, "timing iterations (>= 100)")
      ->check(CLI::Range(100, 100000000));

  CLI11_PARSE(app, argc, argv);

  try {
    if (predict->parsed()) return cmd_predict(opts);
    if (trace->parsed()) return cmd_trace(opts, trace_label);
    if (sweep->parsed()) return cmd_sweep(opts, sweep_spec);
    if (bench->parsed()) return cmd_bench(opts, iterations);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::Overdamped)
      std::cerr << "hint: rerun with --solver oracle\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
