#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

const std::string kBin = SFRKIT_BIN;
const std::string kScenarioDir = SCENARIO_DIR;
const std::string kTmpDir = TEST_TMP_DIR;

int run(const std::string& args) {
  const std::string cmd = kBin + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

std::string write_tmp_json(const std::string& name, const std::string& body) {
  const std::string path = kTmpDir + "/" + name;
  std::ofstream out(path);
  REQUIRE(out.good());
  out << body;
  return path;
}

// Single-SG system with heavy damping and a slow governor: zeta > 1, so the
// analytic path must refuse it while the oracle still integrates fine.
const char* kOverdampedScenario = R"({
  "schema_version": 1,
  "s_base": 1000.0,
  "f_n": 60.0,
  "fleet": [
    {"id": "g", "kind": "SynchronousGenerator", "rating": 1000.0,
     "sg_params": {"h_g": 2.0, "d_g": 40.0, "r_g": 0.03, "t_1": 0.0, "t_g": 2.0}}
  ],
  "disturbances": [{"delta_p_d": -0.1, "label": "trip"}],
  "ufls_threshold": 59.0,
  "solver": "analytic"
})";

}  // namespace

TEST_CASE("predict on the bundled scenario succeeds and writes a report") {
  const std::string out = kTmpDir + "/predict_report.json";
  CHECK(run("predict " + kScenarioDir + "/nine_unit.json --quiet --out " + out) == 0);
  const nlohmann::json report = nlohmann::json::parse(slurp(out));
  CHECK(report.at("results").size() == 1);
  const auto& res = report["results"][0];
  CHECK(res.at("status") == "ok");
  const double f_an = res.at("analytic").at("f_nadir_hz").get<double>();
  const double f_or = res.at("oracle").at("f_nadir_hz").get<double>();
  CHECK(std::abs(f_an - f_or) <= 1e-4);
  CHECK(res.at("agreement").at("f_nadir_abs_err_hz").get<double>() <= 1e-4);
}

TEST_CASE("input errors exit with code 1") {
  CHECK(run("predict " + kTmpDir + "/does_not_exist.json") == 1);
  const std::string bad = write_tmp_json("malformed.json", "{\"schema_version\": 1");
  CHECK(run("predict " + bad) == 1);
  const std::string bad_field =
      write_tmp_json("bad_field.json", R"({"schema_version": 1, "s_base": -5})");
  CHECK(run("predict " + bad_field) == 1);
}

TEST_CASE("overdamped regime exits 2 analytically, 0 with the oracle fallback") {
  const std::string path = write_tmp_json("overdamped.json", kOverdampedScenario);
  CHECK(run("predict " + path + " --quiet") == 2);
  CHECK(run("predict " + path + " --quiet --solver both --dt 0.001 --horizon 20") == 0);
}

TEST_CASE("trace writes horizon/dt + 1 rows") {
  const std::string out = kTmpDir + "/trace.csv";
  CHECK(run("trace " + kScenarioDir + "/nine_unit.json --quiet --dt 0.001 --horizon 5 "
            "--out " + out) == 0);
  const std::string csv = slurp(out);
  CHECK(count_lines(csv) == 5002);  // header + 5001 samples
  CHECK(csv.rfind("t,delta_f_pu,", 0) == 0);
}

TEST_CASE("sweep writes one row per grid point") {
  const std::string out = kTmpDir + "/sweep.csv";
  CHECK(run("sweep " + kScenarioDir + "/sweep_disturbance.json --quiet "
            "--solver analytic --out " + out) == 0);
  const std::string csv = slurp(out);
  CHECK(count_lines(csv) == 10);  // header + 9 rows
  CHECK(csv.rfind("value,f_nadir_hz,", 0) == 0);
}

TEST_CASE("bench runs with a reduced oracle load") {
  CHECK(run("bench " + kScenarioDir + "/nine_unit.json --iterations 100 "
            "--dt 0.001 --horizon 20") == 0);
}

TEST_CASE("unknown subcommand is rejected") {
  CHECK(run("frobnicate") != 0);
}
