#pragma once

#include <initializer_list>
#include <span>

namespace feedersim {

// Shared timed state machine for the voltage-supervised protections
// (electronic relay, contactor, BMS). A trip fires after the undervoltage
// condition has persisted longer than t_trip; reconnection fires after the
// recovery condition has persisted longer than t_rec. Once trip_counter
// reaches max_trip_count the trip output is latched permanently.
struct VoltageProtectionParams {
  bool activated = true;
  double work_time = 0.0;  // s; machine is inert before this instant
  double v_trip = 0.8;     // pu
  double t_trip = 0.5;     // s
  double v_rec = 0.95;     // pu, must be >= v_trip
  double t_rec = 0.01;     // s
  int max_trip_count = 2;
};

struct ProtectionState {
  double trip_timer = 0.0;  // s of continuous condition-for-trip
  double rec_timer = 0.0;   // s of continuous condition-for-reconnect
  int trip_counter = 0;     // fresh trips so far; never decreases
  bool prot_trip = false;   // true = device disconnected by this protection
};

// Advances the machine by one step against the measured terminal voltage.
// The trip branch is evaluated before the reconnect branch; comparisons are
// strict. While the trip delay is still accumulating the output is held
// deasserted, and a fresh assertion increments trip_counter exactly once.
ProtectionState step_voltage_protection(const VoltageProtectionParams& p,
                                        ProtectionState s, double v_measured,
                                        double t_now, double dt);

// Current overload: same accumulate-and-reset delay as the voltage machine
// with the comparison reversed (times while i_measured > i_trip). There is
// no reconnection; the first trip is permanent (max trip count of one).
struct OverloadParams {
  double i_trip = 3.0;  // pu on the motor base
  double t_trip = 0.04; // s
};

ProtectionState step_overload_protection(const OverloadParams& p,
                                         ProtectionState s, double i_measured,
                                         double dt);

// Thermal image: first-order lag of the stall heating power
// r_stall * i^2 toward which the temperature relaxes with time constant
// time_constant. Trips, permanently, when temperature exceeds
// temp_threshold. Heating normally applies only while the motor is stalled;
// heat_when_running extends it to the running current for sensitivity runs.
struct ThermalParams {
  double temp_threshold = 0.15;  // pu
  double time_constant = 10.0;   // s
  double r_stall = 0.054;        // pu
  bool heat_when_running = false;
};

struct ThermalState {
  double temperature = 0.0;  // pu, >= 0
  bool tripped = false;      // latched
};

ThermalState step_thermal_protection(const ThermalParams& p, ThermalState s,
                                     double i_measured, bool is_stalled,
                                     double dt);

// OR gate over the per-protection trip outputs of one device: the device is
// disconnected while any enabled protection asserts.
bool combine_trips(std::span<const bool> trip_signals);

inline bool combine_trips(std::initializer_list<bool> trip_signals) {
  return combine_trips(
      std::span<const bool>(trip_signals.begin(), trip_signals.size()));
}

// Capacitor bank over-voltage switch with a hysteresis band: off at or above
// v_max, on at or below v_min, unchanged in between.
struct CapBankParams {
  double v_max = 1.10;  // pu
  double v_min = 1.05;  // pu, < v_max
};

enum class CapBankStatus { kOn, kOff };

struct CapBankState {
  CapBankStatus status = CapBankStatus::kOn;
};

CapBankState step_capbank(const CapBankParams& p, CapBankState s, double v_op);

}  // namespace feedersim
