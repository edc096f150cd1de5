// Release gate: ten end-to-end checks, one verdict line each. Exits nonzero
// when any check fails so CI can gate on the binary alone.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "feedersim/engine.hpp"
#include "feedersim/protection.hpp"
#include "feedersim/rng.hpp"
#include "feedersim/scenario.hpp"
#include "reference_protection.hpp"

namespace fs = std::filesystem;
using namespace feedersim;
using Clock = std::chrono::steady_clock;

namespace {

const std::string kScenarioDir = FEEDERSIM_SCENARIO_DIR;
const std::string kCli = FEEDERSIM_CLI_PATH;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------
// 1. Voltage protection equals the naive reference on 1000 random traces.

Verdict check_protection_equivalence() {
  const auto t0 = Clock::now();
  Rng rng(0xacce9715u);
  const double dt = 1e-3;
  long steps_checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    VoltageProtectionParams p;
    p.activated = rng.next_double() < 0.9;
    p.work_time = rng.next_double() < 0.7 ? 0.0 : rng.uniform(0.0, 0.3);
    p.v_trip = rng.uniform(0.4, 0.9);
    p.v_rec = p.v_trip + rng.uniform(0.0, 0.2);
    p.t_trip = rng.uniform(0.002, 0.12);
    p.t_rec = rng.uniform(0.001, 0.05);
    p.max_trip_count = 1 + static_cast<int>(rng.uniform(0.0, 3.0));

    ReferenceVoltageProtection ref;
    ref.activated = p.activated;
    ref.work_time = p.work_time;
    ref.v_trip = p.v_trip;
    ref.t_trip = p.t_trip;
    ref.v_rec = p.v_rec;
    ref.t_rec = p.t_rec;
    ref.max_trip_count = p.max_trip_count;

    ProtectionState s;
    double level = rng.uniform(0.2, 1.15);
    int hold = 0;
    for (int k = 0; k < 1500; ++k) {
      if (hold-- <= 0) {
        level = rng.uniform(0.2, 1.15);
        hold = 1 + static_cast<int>(rng.uniform(0.0, 250.0));
      }
      s = step_voltage_protection(p, s, level, k * dt, dt);
      ref.step(level, dt);
      ++steps_checked;
      if (s.prot_trip != ref.prot_trip || s.trip_counter != ref.trip_counter ||
          s.trip_timer != ref.trip_timer || s.rec_timer != ref.rec_timer) {
        std::ostringstream oss;
        oss << "diverged on trial " << trial << " step " << k;
        return {false, oss.str()};
      }
    }
  }
  const double elapsed = seconds_since(t0);
  std::ostringstream oss;
  oss << "1000 traces, " << steps_checked << " states compared in "
      << elapsed << " s";
  if (elapsed >= 10.0) return {false, oss.str() + " (budget 10 s exceeded)"};
  return {true, oss.str()};
}

// ---------------------------------------------------------------------------
// 2 & 10. Thermal trip time against the closed form, at two step sizes.

double thermal_trip_time(double dt) {
  ThermalParams p;
  p.r_stall = 0.054;
  p.time_constant = 10.0;
  p.temp_threshold = 0.15;
  ThermalState s;
  const long max_steps = static_cast<long>(20.0 / dt);
  for (long k = 0; k < max_steps; ++k) {
    s = step_thermal_protection(p, s, 2.0, true, dt);
    if (s.tripped) return static_cast<double>(k) * dt;
  }
  return -1.0;
}

Verdict check_thermal_trip() {
  const double analytic = -10.0 * std::log(1.0 - 0.15 / (0.054 * 4.0));
  const double t = thermal_trip_time(1e-3);
  std::ostringstream oss;
  oss << "tripped at " << t << " s, closed form " << analytic << " s";
  if (t < 0.0 || std::abs(t - analytic) > 2e-3) return {false, oss.str()};
  return {true, oss.str()};
}

Verdict check_thermal_dt_robustness() {
  const double coarse = thermal_trip_time(1e-3);
  const double fine = thermal_trip_time(5e-4);
  std::ostringstream oss;
  oss << "dt 1 ms -> " << coarse << " s, dt 0.5 ms -> " << fine << " s";
  if (coarse < 0.0 || fine < 0.0 || std::abs(coarse - fine) > 1e-3 + 1e-12)
    return {false, oss.str()};
  return {true, oss.str()};
}

// ---------------------------------------------------------------------------
// 3. Overload delay measured from a scripted current crossing.

Verdict check_overload_delay() {
  OverloadParams p;
  p.i_trip = 3.0;
  p.t_trip = 0.04;
  ProtectionState s;
  const double dt = 1e-3;
  double tripped_at = -1.0;
  for (int k = 0; k < 2000 && tripped_at < 0.0; ++k) {
    const double t = k * dt;
    s = step_overload_protection(p, s, t >= 1.222 ? 3.5 : 0.5, dt);
    if (s.prot_trip) tripped_at = t;
  }
  std::ostringstream oss;
  oss << "crossing held from 1.222 s tripped at " << tripped_at << " s";
  if (tripped_at < 0.0 || std::abs(tripped_at - 1.262) > 1e-3 + 1e-9)
    return {false, oss.str()};
  return {true, oss.str()};
}

// ---------------------------------------------------------------------------
// 4. Load composition of the built-in building set.

Verdict check_composition_totals() {
  const CompositionSummary s = composition_summary(builtin_templates());
  struct Row {
    MotorType type;
    double kw;
    double pct;
  };
  const Row rows[] = {{MotorType::kMA, 1986.26, 40.50},
                      {MotorType::kMB, 470.99, 9.60},
                      {MotorType::kMC, 196.00, 4.00},
                      {MotorType::kMD, 780.14, 15.91},
                      {MotorType::kStatic, 1471.45, 30.00}};
  for (const Row& r : rows) {
    if (std::abs(s.kw_of(r.type) - r.kw) > 0.0101) {
      std::ostringstream oss;
      oss << "kW mismatch: got " << s.kw_of(r.type) << ", published " << r.kw;
      return {false, oss.str()};
    }
    if (std::abs(s.percent_of(r.type) - r.pct) >= 0.005) {
      std::ostringstream oss;
      oss << "percent mismatch: got " << s.percent_of(r.type)
          << ", published " << r.pct;
      return {false, oss.str()};
    }
  }
  if (std::abs(s.total_kw - 4904.84) > 0.0101)
    return {false, "total mismatch: got " + std::to_string(s.total_kw)};
  std::ostringstream oss;
  oss << "all five categories and the total match to a cent";
  return {true, oss.str()};
}

// ---------------------------------------------------------------------------
// 5 & 8. The two bundled studies: protection keeps recovery voltage at or
// above the unprotected baseline, and power balances at every step.

struct StudyRuns {
  SimulationTrace a;
  SimulationTrace b;
  double wall_a = 0.0;
  double wall_b = 0.0;
  bool ran = false;
};

StudyRuns& study_runs() {
  static StudyRuns runs = [] {
    StudyRuns r;
    auto t0 = Clock::now();
    Engine ea(load_scenario(kScenarioDir + "/scenario_A.json"));
    r.a = ea.run();
    r.wall_a = seconds_since(t0);
    t0 = Clock::now();
    Engine eb(load_scenario(kScenarioDir + "/scenario_B.json"));
    r.b = eb.run();
    r.wall_b = seconds_since(t0);
    r.ran = true;
    return r;
  }();
  return runs;
}

Verdict check_protection_aids_recovery() {
  const StudyRuns& r = study_runs();
  if (!r.a.complete || !r.b.complete)
    return {false, "a study run aborted: " + r.a.abort_reason + " / " +
                       r.b.abort_reason};
  if (r.wall_a >= 60.0 || r.wall_b >= 60.0) {
    std::ostringstream oss;
    oss << "wall time budget exceeded: " << r.wall_a << " s / " << r.wall_b
        << " s";
    return {false, oss.str()};
  }
  const int col_a = r.a.node_column(r.a.head_node);
  const int col_b = r.b.node_column(r.b.head_node);
  if (col_a < 0 || col_b < 0) return {false, "head node missing from trace"};

  const double dt = r.a.dt;
  const std::size_t k0 = static_cast<std::size_t>(std::llround(1.1 / dt));
  const std::size_t k1 = static_cast<std::size_t>(std::llround(3.1 / dt));
  std::size_t strictly_higher = 0;
  for (std::size_t k = k0; k < k1; ++k) {
    const double va = r.a.node_voltage[col_a][k];
    const double vb = r.b.node_voltage[col_b][k];
    if (va < vb - 1e-12) {
      std::ostringstream oss;
      oss << "protected run dipped below baseline at t = " << k * dt
          << " (" << va << " < " << vb << ")";
      return {false, oss.str()};
    }
    if (va > vb + 1e-12) ++strictly_higher;
  }
  const double frac =
      static_cast<double>(strictly_higher) / static_cast<double>(k1 - k0);
  std::ostringstream oss;
  oss << "never below baseline over [1.1, 3.1) s, strictly above at "
      << 100.0 * frac << "% of steps; wall " << r.wall_a << " s / " << r.wall_b
      << " s";
  if (frac < 0.5) return {false, oss.str()};
  return {true, oss.str()};
}

Verdict check_power_balance() {
  const StudyRuns& r = study_runs();
  if (!r.a.complete) return {false, "run aborted"};
  double worst = 0.0;
  for (const double m : r.a.power_mismatch) worst = std::max(worst, m);
  std::ostringstream oss;
  oss << "worst source/network/device imbalance " << worst << " pu";
  if (worst >= 1e-5) return {false, oss.str()};
  return {true, oss.str()};
}

// ---------------------------------------------------------------------------
// 6 & 7. Scripted single-motor cascades.

Device scripted_motor(MotorType type, const std::string& id) {
  Device d;
  d.id = id;
  d.node = "load";
  MotorParams& m = d.motor;
  m.motor_type = type;
  m.rated_power_kw = 100.0;
  if (type == MotorType::kMA) {
    m.inertia_h = 0.1;
    m.load_torque_exponent = 0.0;
  } else {
    m.inertia_h = 0.5;
    m.load_torque_exponent = 2.0;
  }
  m.torque_rated = calibrate_rated_torque(m, kRatedSlip);
  d.base_mva = m.rated_power_kw / 1000.0 /
               motor_input_power_pu(m, kRatedSlip, 1.0);
  return d;
}

Scenario scripted_scenario(Device device, std::vector<SagInterval> sags,
                           double duration) {
  Scenario sc;
  sc.feeder.nodes = {"src", "load"};
  sc.feeder.source_node = "src";
  sc.feeder.branches.push_back({"src", "load", Complex(0.01, 0.05)});
  sc.source.mode = SourceMode::kStiff;
  sc.source.e_th = Complex(1.0, 0.0);
  sc.source.sag_schedule = std::move(sags);
  sc.duration = duration;
  sc.dt = 1e-3;
  sc.settling_hold = 0.4;
  sc.scenario_hash = "scripted";
  sc.devices.push_back(std::move(device));
  return sc;
}

std::vector<TraceEvent> trips_and_reconnects(const SimulationTrace& t) {
  std::vector<TraceEvent> out;
  for (const auto& e : t.events)
    if (e.kind == "trip" || e.kind == "reconnect") out.push_back(e);
  return out;
}

Verdict check_trip_reconnect_overload_cascade() {
  Device d = scripted_motor(MotorType::kMB, "plant.rtu_fan");
  d.protections.present.p4 = true;
  d.protections.p4.v_trip = 0.55;
  d.protections.p4.t_trip = cycles(1.0);
  d.protections.p4.v_rec = 0.70;
  d.protections.p4.t_rec = cycles(8.5);
  d.protections.p4.max_trip_count = 10;
  d.protections.present.p2 = true;
  d.protections.p2.i_trip = 3.0;
  d.protections.p2.t_trip = 0.04;

  Engine engine(
      scripted_scenario(d, {{1.0, 1.12, 0.30}, {1.12, 1.6, 0.92}}, 3.0));
  const SimulationTrace t = engine.run();
  if (!t.complete) return {false, "run aborted: " + t.abort_reason};

  const auto ev = trips_and_reconnects(t);
  std::ostringstream oss;
  oss << "events:";
  for (const auto& e : ev) oss << " " << e.kind << ":" << e.cause;
  const bool sequence_ok =
      ev.size() == 3 && ev[0].kind == "trip" && ev[0].cause == "P4" &&
      ev[1].kind == "reconnect" && ev[1].cause == "P4" &&
      ev[2].kind == "trip" && ev[2].cause == "P2";
  const bool final_off =
      !t.device_connected.empty() && t.device_connected[0].back() == 0;
  if (!sequence_ok || !final_off)
    return {false, oss.str() + (final_off ? "" : ", device ended connected")};
  return {true, oss.str() + ", device stays disconnected"};
}

Verdict check_trip_budget_latch() {
  Device d = scripted_motor(MotorType::kMA, "plant.chiller");
  d.protections.present.p1 = true;
  d.protections.p1.v_trip = 0.85;
  d.protections.p1.t_trip = 0.35;
  d.protections.p1.v_rec = 0.95;
  d.protections.p1.t_rec = 0.01;
  d.protections.p1.max_trip_count = 2;

  Engine engine(
      scripted_scenario(d, {{1.0, 1.5, 0.70}, {3.0, 3.5, 0.70}}, 5.0));
  const SimulationTrace t = engine.run();
  if (!t.complete) return {false, "run aborted: " + t.abort_reason};

  const auto ev = trips_and_reconnects(t);
  std::ostringstream oss;
  oss << "events:";
  for (const auto& e : ev) oss << " " << e.kind << "@" << e.time;
  int trips = 0;
  int reconnects = 0;
  for (const auto& e : ev) (e.kind == "trip" ? trips : reconnects)++;
  const bool final_off =
      !t.device_connected.empty() && t.device_connected[0].back() == 0;
  if (trips != 2 || reconnects != 1 || ev.size() != 3 || !final_off)
    return {false, oss.str()};
  return {true, oss.str() + "; latched out after the second trip"};
}

// ---------------------------------------------------------------------------
// 9. Two command-line runs with the same seed are byte-identical.

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict check_cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / "feedersim_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string scenario = kScenarioDir + "/scenario_A.json";
  for (const char* sub : {"a", "b"}) {
    const std::string cmd = "\"" + kCli + "\" run --scenario \"" + scenario +
                            "\" --out \"" + (dir / sub).string() +
                            "\" --seed 42 --deterministic > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    if (!WIFEXITED(rc) || WEXITSTATUS(rc) != 0)
      return {false, std::string("run into ") + sub + " failed"};
  }
  for (const char* name : {"voltages.csv", "devices.csv", "events.csv"}) {
    const std::string a = slurp(dir / "a" / name);
    const std::string b = slurp(dir / "b" / name);
    if (a.empty() || a != b)
      return {false, std::string(name) + " differs between identical runs"};
  }
  return {true, "voltages, devices, and events byte-identical across runs"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {"voltage protection matches the reference machine",
       check_protection_equivalence},
      {"thermal trip lands on the closed-form time", check_thermal_trip},
      {"overload trips 40 ms after a held crossing", check_overload_delay},
      {"building composition reproduces the published table",
       check_composition_totals},
      {"protected recovery never falls below the unprotected baseline",
       check_protection_aids_recovery},
      {"deep-sag cascade: contactor trip, reconnect, overload lockout",
       check_trip_reconnect_overload_cascade},
      {"two-trip budget reconnects once then latches out",
       check_trip_budget_latch},
      {"complex power balances at every step", check_power_balance},
      {"same-seed command-line runs are byte-identical",
       check_cli_determinism},
      {"halved time step moves the thermal trip by at most 1 ms",
       check_thermal_dt_robustness},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << (i + 1) << ". "
              << criteria[i].name << " — " << v.detail << "\n";
  }
  std::cout << (failures == 0 ? "all 10 checks passed"
                              : std::to_string(failures) + " check(s) failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
