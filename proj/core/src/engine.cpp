#include "feedersim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace feedersim {

double SimulationTrace::max_power_mismatch() const {
  double worst = 0.0;
  for (double m : power_mismatch) worst = std::max(worst, m);
  return worst;
}

int SimulationTrace::node_column(const std::string& name) const {
  for (std::size_t i = 0; i < node_names.size(); ++i)
    if (node_names[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

// P1..P5 assert flags of one device, in protection order.
std::array<bool, 5> assert_flags(const DeviceRuntime& d) {
  const ProtSet& on = d.spec.protections.present;
  return {on.p1 && d.p1.prot_trip, on.p2 && d.p2.prot_trip,
          on.p3 && d.p3.tripped, on.p4 && d.p4.prot_trip,
          on.p5 && d.p5.prot_trip};
}

constexpr const char* kProtNames[5] = {"P1", "P2", "P3", "P4", "P5"};

}  // namespace

Engine::Engine(Scenario scenario) : sc_(std::move(scenario)) {
  devices_.reserve(sc_.devices.size());
  device_node_.reserve(sc_.devices.size());
  for (const Device& d : sc_.devices) {
    try {
      device_node_.push_back(node_index(sc_.feeder, d.node));
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("device " + d.id +
                                  " is attached to unknown node " + d.node);
    }
    DeviceRuntime rt;
    rt.spec = d;
    devices_.push_back(std::move(rt));
  }
  zip_node_.reserve(sc_.zip_loads.size());
  for (const auto& [node, load] : sc_.zip_loads) {
    try {
      zip_node_.push_back(node_index(sc_.feeder, node));
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("static load on unknown node " + node);
    }
  }
  for (const CapBankInstallation& cb : sc_.feeder.cap_banks)
    capbank_status_[cb.node] = CapBankStatus::kOn;

  solver_ = std::make_unique<NetworkSolver>(sc_.feeder, sc_.source);

  trace_.node_names = sc_.feeder.nodes;
  trace_.node_voltage.assign(trace_.node_names.size(), {});
  for (const DeviceRuntime& d : devices_) trace_.device_ids.push_back(d.spec.id);
  trace_.device_current.assign(devices_.size(), {});
  trace_.device_connected.assign(devices_.size(), {});
  trace_.device_stalled.assign(devices_.size(), {});
  trace_.device_temperature.assign(devices_.size(), {});
  trace_.head_node = sc_.feeder.source_node;
  trace_.dt = sc_.dt;
  trace_.seed = sc_.rng_seed;
  trace_.scenario_hash = sc_.scenario_hash;
  trace_.warnings = sc_.warnings;
}

Eigen::VectorXcd Engine::injections_at(const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd inj = Eigen::VectorXcd::Zero(v.size());
  for (std::size_t k = 0; k < devices_.size(); ++k) {
    const DeviceRuntime& d = devices_[k];
    const int n = device_node_[k];
    const Complex i_motor = motor_drawn_current(d.spec.motor, d.motor, v[n]);
    // Motor-base current to system base.
    inj[n] -= i_motor * (d.spec.base_mva / sc_.feeder.base_mva);
  }
  for (std::size_t k = 0; k < sc_.zip_loads.size(); ++k) {
    const int n = zip_node_[k];
    const Complex vt = v[n];
    const double v_mag = std::abs(vt);
    if (v_mag <= 1e-12) continue;
    const Complex s_pu =
        zip_power(sc_.zip_loads[k].second, v_mag) / (sc_.feeder.base_mva * 1e3);
    inj[n] -= std::conj(s_pu / vt);
  }
  return inj;
}

Complex Engine::total_device_power(const Eigen::VectorXcd& v) const {
  Complex s(0.0, 0.0);
  for (std::size_t k = 0; k < devices_.size(); ++k) {
    const DeviceRuntime& d = devices_[k];
    const Complex vt = v[device_node_[k]];
    const Complex i_sys = motor_drawn_current(d.spec.motor, d.motor, vt) *
                          (d.spec.base_mva / sc_.feeder.base_mva);
    s += vt * std::conj(i_sys);
  }
  for (std::size_t k = 0; k < sc_.zip_loads.size(); ++k) {
    const double v_mag = std::abs(v[zip_node_[k]]);
    s += zip_power(sc_.zip_loads[k].second, v_mag) / (sc_.feeder.base_mva * 1e3);
  }
  return s;
}

void Engine::check_finite(const Eigen::VectorXcd& v, double t) const {
  if (v.allFinite()) return;
  std::ostringstream msg;
  msg << "non-finite node voltage at t=" << t << " s";
  throw std::runtime_error(msg.str());
}

void Engine::initialize() {
  if (initialized_) return;

  for (DeviceRuntime& d : devices_) {
    d.motor = MotorState{};
    d.motor.connected = true;
    d.p1 = ProtectionState{};
    d.p2 = ProtectionState{};
    d.p3 = ThermalState{};
    d.p4 = ProtectionState{};
    d.p5 = ProtectionState{};
  }

  // Pre-event operating point: alternate between the network solution and
  // the steady-state slip of every running motor until the slips settle.
  const auto inj_fn = [this](const Eigen::VectorXcd& vv) {
    return injections_at(vv);
  };
  Eigen::VectorXcd v;
  bool settled = false;
  for (int round = 0; round < 100 && !settled; ++round) {
    v = solver_->solve(inj_fn, 0.0, v.size() > 0 ? &v : nullptr);
    check_finite(v, 0.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < devices_.size(); ++k) {
      DeviceRuntime& d = devices_[k];
      if (d.spec.motor.motor_type == MotorType::kMD) continue;
      const double v_mag = std::abs(v[device_node_[k]]);
      const double s_eq = steady_state_slip(d.spec.motor, v_mag);
      if (!std::isfinite(s_eq)) {
        std::ostringstream msg;
        msg << "device " << d.spec.id
            << " has no steady-state operating point at " << v_mag << " pu";
        throw std::runtime_error(msg.str());
      }
      worst = std::max(worst, std::abs(s_eq - d.motor.slip));
      d.motor.slip = s_eq;
    }
    settled = worst < 1e-12;
  }
  if (!settled)
    throw std::runtime_error("initial operating point did not settle");

  for (std::size_t k = 0; k < devices_.size(); ++k) {
    DeviceRuntime& d = devices_[k];
    const Complex vt = v[device_node_[k]];
    d.motor.terminal_voltage = vt;
    d.motor.drawn_current = motor_drawn_current(d.spec.motor, d.motor, vt);
    d.measured_current = std::abs(d.motor.drawn_current);
  }
  last_voltages_ = v;
  initialized_ = true;
}

void Engine::step() {
  if (!initialized_) initialize();
  const double t = time();

  // A bank switched during the previous step: re-stamp before solving.
  if (capbank_dirty_) {
    solver_->set_capbank_statuses(capbank_status_);
    capbank_dirty_ = false;
  }

  // Network solution with every device state frozen at its start-of-step
  // value; this is what the relays measure over [t, t+dt).
  const Eigen::VectorXcd v = solver_->solve(
      [this](const Eigen::VectorXcd& vv) { return injections_at(vv); }, t,
      &last_voltages_);
  check_finite(v, t);

  // Power bookkeeping against the same frozen states the solve used.
  const Eigen::VectorXcd inj = injections_at(v);
  const Complex s_src = solver_->source_power(v, t, inj);
  const Complex s_net = solver_->network_power(v);
  const Complex s_dev = total_device_power(v);
  const double mismatch = std::abs(s_src - s_net - s_dev);

  for (std::size_t k = 0; k < devices_.size(); ++k) {
    DeviceRuntime& d = devices_[k];
    const Complex vt = v[device_node_[k]];
    d.measured_current =
        std::abs(motor_drawn_current(d.spec.motor, d.motor, vt));
  }

  // Protection machines run on the measurements; the combined trip decides
  // the connection status the motors integrate with.
  for (std::size_t k = 0; k < devices_.size(); ++k) {
    DeviceRuntime& d = devices_[k];
    const ProtectionAssignment& pa = d.spec.protections;
    const double v_mag = std::abs(v[device_node_[k]]);

    const std::array<bool, 5> before = assert_flags(d);
    if (pa.present.p1)
      d.p1 = step_voltage_protection(pa.p1, d.p1, v_mag, t, sc_.dt);
    if (pa.present.p2)
      d.p2 = step_overload_protection(pa.p2, d.p2, d.measured_current, sc_.dt);
    if (pa.present.p3)
      d.p3 = step_thermal_protection(pa.p3, d.p3, d.measured_current,
                                     d.motor.stalled, sc_.dt);
    if (pa.present.p4)
      d.p4 = step_voltage_protection(pa.p4, d.p4, v_mag, t, sc_.dt);
    if (pa.present.p5)
      d.p5 = step_voltage_protection(pa.p5, d.p5, v_mag, t, sc_.dt);
    const std::array<bool, 5> after = assert_flags(d);

    const bool was_connected = d.motor.connected;
    const bool now_connected = !combine_trips(
        std::span<const bool>(after.data(), after.size()));
    if (was_connected && !now_connected) {
      std::string cause = "P?";
      for (int i = 0; i < 5; ++i)
        if (after[i] && !before[i]) {
          cause = kProtNames[i];
          break;
        }
      trace_.events.push_back({t, d.spec.id, "trip", cause});
    } else if (!was_connected && now_connected) {
      std::string cause = "P?";
      for (int i = 0; i < 5; ++i)
        if (before[i] && !after[i]) {
          cause = kProtNames[i];
          break;
        }
      trace_.events.push_back({t, d.spec.id, "reconnect", cause});
    }
    d.motor.connected = now_connected;
  }

  // Capacitor banks switch on the same measurements; the admittance change
  // takes effect at the next solve.
  for (const CapBankInstallation& cb : sc_.feeder.cap_banks) {
    const double v_mag = std::abs(v[node_index(sc_.feeder, cb.node)]);
    const CapBankStatus old_status = capbank_status_[cb.node];
    const CapBankState next =
        step_capbank(cb.params, CapBankState{old_status}, v_mag);
    if (next.status == old_status) continue;
    capbank_status_[cb.node] = next.status;
    capbank_dirty_ = true;
    trace_.events.push_back(
        {t, "capbank_" + cb.node,
         next.status == CapBankStatus::kOff ? "capbank_off" : "capbank_on",
         "capbank"});
  }

  // Electromechanical update under the fresh connection statuses.
  for (std::size_t k = 0; k < devices_.size(); ++k) {
    DeviceRuntime& d = devices_[k];
    const Complex vt = v[device_node_[k]];
    const bool was_stalled = d.motor.stalled;
    if (d.spec.motor.motor_type == MotorType::kMD)
      d.motor = step_single_phase_motor(d.spec.motor, d.motor, vt, sc_.dt);
    else
      d.motor = step_three_phase_motor(d.spec.motor, d.motor, vt, sc_.dt);
    if (!was_stalled && d.motor.stalled)
      trace_.events.push_back({t, d.spec.id, "stall", "motor"});
  }

  record_step(t, v, mismatch);
  last_voltages_ = v;
  ++steps_done_;
}

void Engine::record_step(double t, const Eigen::VectorXcd& v,
                         double mismatch) {
  trace_.time.push_back(t);
  for (std::size_t n = 0; n < trace_.node_names.size(); ++n)
    trace_.node_voltage[n].push_back(std::abs(v[static_cast<int>(n)]));
  for (std::size_t k = 0; k < devices_.size(); ++k) {
    const DeviceRuntime& d = devices_[k];
    trace_.device_current[k].push_back(std::abs(d.motor.drawn_current));
    trace_.device_connected[k].push_back(d.motor.connected ? 1 : 0);
    trace_.device_stalled[k].push_back(d.motor.stalled ? 1 : 0);
    trace_.device_temperature[k].push_back(d.p3.temperature);
  }
  trace_.power_mismatch.push_back(mismatch);
}

SimulationTrace Engine::run() {
  const auto n_steps =
      static_cast<std::size_t>(std::llround(sc_.duration / sc_.dt));
  try {
    initialize();
    while (steps_done_ < n_steps) step();
  } catch (const std::exception& e) {
    trace_.complete = false;
    trace_.abort_reason = e.what();
  }
  return trace_;
}

ComparisonReport compare_runs(const SimulationTrace& a,
                              const SimulationTrace& b) {
  if (a.node_names != b.node_names)
    throw std::invalid_argument("runs cover different node sets");
  if (a.time.size() != b.time.size())
    throw std::invalid_argument("runs cover different time grids");
  for (std::size_t k = 0; k < a.time.size(); ++k)
    if (std::abs(a.time[k] - b.time[k]) > 1e-9)
      throw std::invalid_argument("runs cover different time grids");

  ComparisonReport rep;
  rep.time = a.time;
  rep.nodes = a.node_names;
  rep.voltage_diff.assign(rep.nodes.size(), {});
  for (std::size_t n = 0; n < rep.nodes.size(); ++n) {
    rep.voltage_diff[n].resize(rep.time.size());
    for (std::size_t k = 0; k < rep.time.size(); ++k)
      rep.voltage_diff[n][k] = a.node_voltage[n][k] - b.node_voltage[n][k];
  }
  for (const TraceEvent& e : a.events)
    if (e.kind == "trip") ++rep.trip_counts_a[e.cause];
  for (const TraceEvent& e : b.events)
    if (e.kind == "trip") ++rep.trip_counts_b[e.cause];

  const auto recovery = [](const SimulationTrace& tr) {
    int h = tr.node_column(tr.head_node);
    if (h < 0) h = 0;
    if (tr.node_voltage.empty() || tr.node_voltage[h].empty()) return 0.0;
    const std::vector<double>& vv = tr.node_voltage[static_cast<std::size_t>(h)];
    std::size_t depart = vv.size();
    for (std::size_t k = 0; k < vv.size(); ++k)
      if (vv[k] < 0.95) {
        depart = k;
        break;
      }
    if (depart == vv.size()) return 0.0;  // never left the band
    for (std::size_t k = depart; k < vv.size(); ++k)
      if (vv[k] >= 0.95) return tr.time[k];
    return -1.0;  // never recovered
  };
  rep.recovery_time_a = recovery(a);
  rep.recovery_time_b = recovery(b);
  return rep;
}

}  // namespace feedersim
