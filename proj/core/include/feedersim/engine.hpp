#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "feedersim/motor.hpp"
#include "feedersim/network.hpp"
#include "feedersim/protection.hpp"
#include "feedersim/scenario.hpp"

namespace feedersim {

struct TraceEvent {
  double time = 0.0;
  std::string device;
  std::string kind;   // trip | reconnect | stall | capbank_off | capbank_on
  std::string cause;  // P1..P5 | motor | capbank
};

// Column-wise recording of one run. Rows are simulation steps at
// time[k] = k * dt; device flags are the post-update values at that instant,
// so a transition row and its event share the same timestamp.
struct SimulationTrace {
  std::vector<double> time;
  std::vector<std::string> node_names;
  std::vector<std::vector<double>> node_voltage;  // [node][step], pu

  std::vector<std::string> device_ids;
  std::vector<std::vector<double>> device_current;  // [device][step], pu
  std::vector<std::vector<char>> device_connected;  // [device][step], 0/1
  std::vector<std::vector<char>> device_stalled;    // [device][step], 0/1
  std::vector<std::vector<double>> device_temperature;  // [device][step]

  std::vector<TraceEvent> events;
  std::vector<double> power_mismatch;  // |S_src - S_net - S_dev| per step

  std::string head_node;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  std::string scenario_hash;
  std::vector<std::string> warnings;

  bool complete = true;
  std::string abort_reason;

  double max_power_mismatch() const;
  int node_column(const std::string& name) const;  // -1 when absent
};

// One device with its live electromechanical and protection state.
struct DeviceRuntime {
  Device spec;
  MotorState motor;
  ProtectionState p1;
  ProtectionState p2;
  ThermalState p3;
  ProtectionState p4;
  ProtectionState p5;
  double measured_current = 0.0;  // |I| of the last step, motor base
};

// Fixed-step simulation loop. Per step: source voltage -> network solve with
// device states frozen -> protection stepping on the measurements ->
// status application (effective from the next solve) -> motor integration ->
// recording.
class Engine {
 public:
  explicit Engine(Scenario scenario);

  // Solves the pre-event equilibrium: motors placed at the steady-state slip
  // consistent with the solved voltages. Called lazily by step()/run().
  void initialize();

  // Advances one dt. Throws SolverError / std::runtime_error on
  // non-convergence or non-finite state.
  void step();

  // Runs the full duration. Aborts are captured in the returned trace
  // (complete = false, abort_reason set) together with all steps recorded
  // so far.
  SimulationTrace run();

  double time() const { return static_cast<double>(steps_done_) * sc_.dt; }
  const Scenario& scenario() const { return sc_; }
  const std::vector<DeviceRuntime>& devices() const { return devices_; }
  const SimulationTrace& trace() const { return trace_; }
  SimulationTrace take_trace() { return std::move(trace_); }

 private:
  Eigen::VectorXcd injections_at(const Eigen::VectorXcd& v) const;
  Complex total_device_power(const Eigen::VectorXcd& v) const;
  void record_step(double t, const Eigen::VectorXcd& v, double mismatch);
  void check_finite(const Eigen::VectorXcd& v, double t) const;

  Scenario sc_;
  std::vector<DeviceRuntime> devices_;
  std::vector<int> device_node_;       // node column per device
  std::vector<int> zip_node_;          // node column per zip load
  std::map<std::string, CapBankStatus> capbank_status_;
  bool capbank_dirty_ = false;
  std::unique_ptr<NetworkSolver> solver_;
  Eigen::VectorXcd last_voltages_;
  SimulationTrace trace_;
  std::size_t steps_done_ = 0;
  bool initialized_ = false;
};

struct ComparisonReport {
  std::vector<double> time;
  std::vector<std::string> nodes;
  std::vector<std::vector<double>> voltage_diff;  // [node][step], a - b
  std::map<std::string, int> trip_counts_a;       // cause -> kind==trip count
  std::map<std::string, int> trip_counts_b;
  // First time the head voltage re-enters the 0.95 pu band after having
  // left it; 0 when it never left, -1 when it never recovered.
  double recovery_time_a = 0.0;
  double recovery_time_b = 0.0;
};

// Requires identical time grids and node sets; throws std::invalid_argument
// otherwise.
ComparisonReport compare_runs(const SimulationTrace& a,
                              const SimulationTrace& b);

}  // namespace feedersim
