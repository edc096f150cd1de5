#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = FEEDERSIM_CLI_PATH;
const std::string kScenarioA =
    std::string(FEEDERSIM_SCENARIO_DIR) + "/scenario_A.json";

fs::path work_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "feedersim_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = "\"" + kCli + "\" " + args + " > \"" +
                          out.string() + "\" 2> \"" + err.string() + "\"";
  const int rc = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

}  // namespace

TEST_CASE("run writes the full output set and exits cleanly") {
  const fs::path dir = work_dir("run_ok");
  const fs::path out = dir / "trace";
  const CliResult r = run_cli("run --scenario \"" + kScenarioA + "\" --out \"" +
                                  out.string() + "\" --deterministic --plot",
                              dir);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(out / "voltages.csv"));
  CHECK(fs::exists(out / "devices.csv"));
  CHECK(fs::exists(out / "events.csv"));
  CHECK(fs::exists(out / "metadata.json"));
  CHECK(fs::exists(out / "head_voltage.svg"));
  CHECK_FALSE(fs::exists(out / "voltages.csv.partial"));
  CHECK(r.out.find("events") != std::string::npos);
}

TEST_CASE("two runs with the same seed are byte-identical") {
  const fs::path dir = work_dir("determinism");
  const fs::path a = dir / "a";
  const fs::path b = dir / "b";
  for (const auto& out : {a, b}) {
    const CliResult r =
        run_cli("run --scenario \"" + kScenarioA + "\" --out \"" +
                    out.string() + "\" --deterministic",
                dir);
    REQUIRE(r.exit_code == 0);
  }
  for (const char* name :
       {"voltages.csv", "devices.csv", "events.csv", "metadata.json"}) {
    CAPTURE(name);
    CHECK(read_file(a / name) == read_file(b / name));
    CHECK(!read_file(a / name).empty());
  }
}

TEST_CASE("a seed override changes the sampled protection outcomes") {
  const fs::path dir = work_dir("seed_override");
  const fs::path out = dir / "t";
  const CliResult r =
      run_cli("run --scenario \"" + kScenarioA + "\" --out \"" +
                  out.string() + "\" --seed 7 --duration 0.5 --deterministic",
              dir);
  CHECK(r.exit_code == 0);
  const std::string meta = read_file(out / "metadata.json");
  CHECK(meta.find("\"rng_seed\": 7") != std::string::npos);
  CHECK(meta.find("\"steps\": 500") != std::string::npos);
}

TEST_CASE("a missing scenario file names the path and exits 1") {
  const fs::path dir = work_dir("missing");
  const CliResult r =
      run_cli("run --scenario /nonexistent/feeder.json --out \"" +
                  (dir / "t").string() + "\"",
              dir);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("/nonexistent/feeder.json") != std::string::npos);
}

TEST_CASE("validate accepts the bundled study and rejects a broken one") {
  const fs::path dir = work_dir("validate");
  const CliResult ok =
      run_cli("validate --scenario \"" + kScenarioA + "\"", dir);
  CHECK(ok.exit_code == 0);
  CHECK(ok.out.find("valid") != std::string::npos);

  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << R"({
    "feeder": {"nodes": ["head"], "source_node": "head"},
    "source": {"mode": "stiff", "e_th": 1.0},
    "protections": {},
    "buildings": [{"template": "no_such_template", "node": "head"}],
    "simulation": {"rng_seed": 1, "duration": 1.0, "dt": 0.001,
                   "zip": {"a_z": 0.5, "a_i": 0.3, "a_p": 0.3}}
  })";
  const CliResult rej =
      run_cli("validate --scenario \"" + bad.string() + "\"", dir);
  CHECK(rej.exit_code == 1);
  CHECK(rej.err.find("unknown template") != std::string::npos);
  CHECK(rej.err.find("a_z + a_i + a_p") != std::string::npos);
}

TEST_CASE("a collapsing run exits 2 and marks its outputs partial") {
  const fs::path dir = work_dir("abort");
  const fs::path bad = dir / "overload.json";
  // A 4 GW shopping district on a 10 MVA feeder: no operating point exists.
  std::ofstream(bad) << R"({
    "feeder": {
      "nodes": ["head", "b1"],
      "source_node": "head",
      "branches": [{"from": "head", "to": "b1", "r": 0.01, "x": 0.06}]
    },
    "source": {"mode": "thevenin", "e_th": 1.0, "z_th": {"r": 0.004, "x": 0.04}},
    "protections": {},
    "buildings": [{"template": "school", "node": "b1", "scale": 2000.0}],
    "simulation": {"rng_seed": 1, "duration": 2.0, "dt": 0.001}
  })";
  const fs::path out = dir / "t";
  const CliResult r = run_cli(
      "run --scenario \"" + bad.string() + "\" --out \"" + out.string() + "\"",
      dir);
  CHECK(r.exit_code == 2);
  CHECK(!r.err.empty());
  CHECK(fs::exists(out / "voltages.csv.partial"));
  CHECK(fs::exists(out / "metadata.json"));
  CHECK_FALSE(fs::exists(out / "voltages.csv"));
  const std::string meta = read_file(out / "metadata.json");
  CHECK(meta.find("\"complete\": false") != std::string::npos);
}

TEST_CASE("compare overlays two finished traces") {
  const fs::path dir = work_dir("compare");
  const fs::path a = dir / "a";
  const fs::path b = dir / "b";
  for (const auto& out : {a, b}) {
    const CliResult r =
        run_cli("run --scenario \"" + kScenarioA + "\" --out \"" +
                    out.string() + "\" --deterministic",
                dir);
    REQUIRE(r.exit_code == 0);
  }
  const fs::path cmp = dir / "cmp";
  const CliResult r = run_cli("compare \"" + a.string() + "\" \"" +
                                  b.string() + "\" --out \"" + cmp.string() +
                                  "\"",
                              dir);
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(cmp / "comparison.csv"));
  CHECK(fs::exists(cmp / "compare.svg"));
  CHECK(r.out.find("trips by cause") != std::string::npos);
  CHECK(r.out.find("recovery") != std::string::npos);
}
