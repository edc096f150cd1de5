// Command line front end: run one scenario, diff two runs, or validate a
// scenario file without running it.

#include "CLI11.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "feedersim/engine.hpp"
#include "feedersim/scenario.hpp"
#include "feedersim/svg.hpp"
#include "feedersim/trace_io.hpp"
#include "feedersim/version.hpp"

namespace fs = std::filesystem;

namespace {

using namespace feedersim;

struct RunOpts {
  std::string scenario;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
  std::optional<double> dt;
  bool plot = false;
  bool deterministic = false;
};

struct CompareOpts {
  std::string a;
  std::string b;
  std::string out = "compare_out";
};

std::string safe_filename(const std::string& id) {
  std::string out;
  for (char c : id)
    out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

int load_or_fail(const std::string& path, Scenario& sc) {
  if (!fs::exists(path)) {
    std::cerr << "error: scenario file not found: " << path << '\n';
    return 1;
  }
  try {
    sc = load_scenario(path);
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << path << " failed validation:\n";
    for (const std::string& p : e.problems) std::cerr << "  - " << p << '\n';
    return 1;
  }
  return 0;
}

void write_plots(const Scenario& sc, const SimulationTrace& trace,
                 const fs::path& out_dir) {
  int head = trace.node_column(trace.head_node);
  if (head < 0) head = 0;
  write_line_chart(
      (out_dir / "head_voltage.svg").string(),
      {{trace.head_node, trace.time,
        trace.node_voltage[static_cast<std::size_t>(head)]}},
      {.title = "Head-node voltage", .x_label = "time (s)",
       .y_label = "voltage (pu)"});

  // Panels for the first few devices to trip, in trip order.
  std::vector<std::pair<double, std::string>> first_trips;
  for (const TraceEvent& e : trace.events) {
    if (e.kind != "trip") continue;
    bool seen = false;
    for (const auto& [t, id] : first_trips) seen = seen || id == e.device;
    if (!seen) first_trips.emplace_back(e.time, e.device);
  }
  std::sort(first_trips.begin(), first_trips.end());
  if (first_trips.size() > 3) first_trips.resize(3);

  std::map<std::string, std::string> node_of;
  for (const Device& d : sc.devices) node_of[d.id] = d.node;

  for (const auto& [trip_time, id] : first_trips) {
    std::size_t di = trace.device_ids.size();
    for (std::size_t k = 0; k < trace.device_ids.size(); ++k)
      if (trace.device_ids[k] == id) di = k;
    if (di == trace.device_ids.size()) continue;
    int node = trace.node_column(node_of.count(id) ? node_of.at(id) : "");
    if (node < 0) node = head;
    std::vector<double> status(trace.time.size());
    for (std::size_t k = 0; k < status.size(); ++k)
      status[k] = trace.device_connected[di][k];
    write_line_chart(
        (out_dir / ("device_" + safe_filename(id) + ".svg")).string(),
        {{"terminal voltage (pu)", trace.time,
          trace.node_voltage[static_cast<std::size_t>(node)]},
         {"current (pu)", trace.time, trace.device_current[di]},
         {"connected", trace.time, status}},
        {.title = id, .x_label = "time (s)", .y_label = "pu / status"});
  }
}

int cmd_run(const RunOpts& o) {
  Scenario sc;
  if (const int rc = load_or_fail(o.scenario, sc)) return rc;
  if (o.seed) {
    sc.rng_seed = *o.seed;
    rebuild_devices(sc);
  }
  if (o.duration) sc.duration = *o.duration;
  if (o.dt) sc.dt = *o.dt;
  if (sc.dt <= 0.0 || sc.duration <= sc.dt) {
    std::cerr << "error: need dt > 0 and duration > dt (dt=" << sc.dt
              << ", duration=" << sc.duration << ")\n";
    return 1;
  }
  for (const std::string& w : sc.warnings)
    std::cerr << "warning: " << w << '\n';

  SimulationTrace trace;
  try {
    Engine engine(std::move(sc));
    trace = engine.run();
    write_trace(trace, o.out, o.deterministic);
    if (o.plot) write_plots(engine.scenario(), trace, o.out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  std::cout << "steps: " << trace.time.size() << '\n'
            << "events: " << trace.events.size() << '\n'
            << "max power mismatch: " << std::setprecision(3)
            << trace.max_power_mismatch() << " pu\n"
            << "output: " << o.out << '\n';
  if (!trace.complete) {
    std::cerr << "error: run aborted: " << trace.abort_reason << '\n';
    return 2;
  }
  return 0;
}

int cmd_validate(const std::string& path) {
  Scenario sc;
  if (const int rc = load_or_fail(path, sc)) return rc;
  for (const std::string& w : sc.warnings)
    std::cerr << "warning: " << w << '\n';
  std::cout << path << ": valid (" << sc.devices.size() << " devices on "
            << sc.feeder.nodes.size() << " nodes)\n";
  return 0;
}

// Trace directory when the path is a directory, otherwise run the scenario.
int obtain_trace(const std::string& path, SimulationTrace& trace) {
  if (fs::is_directory(path)) {
    try {
      trace = read_trace_dir(path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
    return 0;
  }
  Scenario sc;
  if (const int rc = load_or_fail(path, sc)) return rc;
  try {
    Engine engine(std::move(sc));
    trace = engine.run();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  if (!trace.complete) {
    std::cerr << "error: run of " << path
              << " aborted: " << trace.abort_reason << '\n';
    return 2;
  }
  return 0;
}

std::string describe_recovery(double r) {
  if (r == 0.0) return "stayed above 0.95 pu";
  if (r < 0.0) return "never recovered";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3f s", r);
  return buf;
}

int cmd_compare(const CompareOpts& o) {
  SimulationTrace ta, tb;
  if (const int rc = obtain_trace(o.a, ta)) return rc;
  if (const int rc = obtain_trace(o.b, tb)) return rc;
  std::string la = fs::path(o.a).stem().string();
  std::string lb = fs::path(o.b).stem().string();
  if (la == lb) lb += " (b)";

  ComparisonReport rep;
  try {
    rep = compare_runs(ta, tb);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  fs::create_directories(o.out);
  write_comparison_csv(rep, (fs::path(o.out) / "comparison.csv").string());
  int ha = ta.node_column(ta.head_node);
  if (ha < 0) ha = 0;
  int hb = tb.node_column(tb.head_node);
  if (hb < 0) hb = 0;
  write_line_chart(
      (fs::path(o.out) / "compare.svg").string(),
      {{la, ta.time, ta.node_voltage[static_cast<std::size_t>(ha)]},
       {lb, tb.time, tb.node_voltage[static_cast<std::size_t>(hb)]}},
      {.title = "Head-node voltage", .x_label = "time (s)",
       .y_label = "voltage (pu)"});

  std::set<std::string> causes;
  for (const auto& [cause, n] : rep.trip_counts_a) causes.insert(cause);
  for (const auto& [cause, n] : rep.trip_counts_b) causes.insert(cause);
  const auto count = [](const std::map<std::string, int>& m,
                        const std::string& k) {
    const auto it = m.find(k);
    return it == m.end() ? 0 : it->second;
  };
  std::cout << "trips by cause:\n"
            << "  " << std::left << std::setw(8) << "cause" << std::setw(14)
            << la << lb << '\n';
  if (causes.empty()) std::cout << "  (none in either run)\n";
  for (const std::string& c : causes)
    std::cout << "  " << std::left << std::setw(8) << c << std::setw(14)
              << count(rep.trip_counts_a, c) << count(rep.trip_counts_b, c)
              << '\n';
  std::cout << "head-voltage recovery: " << la << ": "
            << describe_recovery(rep.recovery_time_a) << ", " << lb << ": "
            << describe_recovery(rep.recovery_time_b) << '\n'
            << "output: " << o.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic phasor simulation of a radial feeder with "
               "motor-protection cascades"};
  app.set_version_flag("--version", feedersim::kVersion);
  app.require_subcommand(1);

  RunOpts ro;
  CLI::App* run = app.add_subcommand("run", "simulate a scenario and export "
                                            "CSV traces");
  run->add_option("--scenario", ro.scenario, "scenario JSON file")->required();
  run->add_option("--out", ro.out, "output directory")->capture_default_str();
  run->add_option("--seed", ro.seed, "override the scenario RNG seed");
  run->add_option("--duration", ro.duration, "override the duration (s)");
  run->add_option("--dt", ro.dt, "override the time step (s)");
  run->add_flag("--plot", ro.plot, "also write SVG charts");
  run->add_flag("--deterministic", ro.deterministic,
                "omit wall-clock metadata so reruns are byte-identical");

  CompareOpts co;
  CLI::App* cmp = app.add_subcommand(
      "compare", "diff two runs (scenario files or trace directories)");
  cmp->add_option("a", co.a, "first scenario file or trace directory")
      ->required();
  cmp->add_option("b", co.b, "second scenario file or trace directory")
      ->required();
  cmp->add_option("--out", co.out, "output directory")->capture_default_str();

  std::string validate_path;
  CLI::App* val =
      app.add_subcommand("validate", "check a scenario file without running");
  val->add_option("--scenario", validate_path, "scenario JSON file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(ro);
  if (cmp->parsed()) return cmd_compare(co);
  return cmd_validate(validate_path);
}
