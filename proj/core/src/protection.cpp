#include "feedersim/protection.hpp"

#include <cassert>
#include <cmath>

namespace feedersim {

ProtectionState step_voltage_protection(const VoltageProtectionParams& p,
                                        ProtectionState s, double v_measured,
                                        double t_now, double dt) {
  assert(dt > 0.0);
  if (!p.activated || t_now < p.work_time) return s;

  if (v_measured < p.v_trip) {
    s.trip_timer += dt;
    if (s.trip_timer > p.t_trip) {
      if (!s.prot_trip) ++s.trip_counter;
      s.prot_trip = true;
    } else {
      // Output is held low while the delay is still accumulating, even if a
      // previous trip was in force.
      s.prot_trip = false;
    }
  } else {
    s.trip_timer = 0.0;
  }

  if (s.prot_trip) {
    if (v_measured > p.v_rec) {
      s.rec_timer += dt;
      if (s.rec_timer > p.t_rec) {
        s.prot_trip = false;
        s.trip_timer = 0.0;
        // rec_timer deliberately keeps its value here; it is cleared on the
        // next tripped step with v <= v_rec before it can be read again.
      }
    } else {
      s.rec_timer = 0.0;
    }
  }

  if (s.trip_counter >= p.max_trip_count) s.prot_trip = true;

  return s;
}

ProtectionState step_overload_protection(const OverloadParams& p,
                                         ProtectionState s, double i_measured,
                                         double dt) {
  assert(dt > 0.0);

  if (i_measured > p.i_trip) {
    s.trip_timer += dt;
    if (s.trip_timer > p.t_trip) {
      if (!s.prot_trip) ++s.trip_counter;
      s.prot_trip = true;
    } else {
      s.prot_trip = false;
    }
  } else {
    s.trip_timer = 0.0;
  }

  // Single-shot: the first trip is permanent.
  if (s.trip_counter >= 1) s.prot_trip = true;

  return s;
}

ThermalState step_thermal_protection(const ThermalParams& p, ThermalState s,
                                     double i_measured, bool is_stalled,
                                     double dt) {
  assert(dt > 0.0);

  const bool heating = is_stalled || p.heat_when_running;
  const double u = heating ? p.r_stall * i_measured * i_measured : 0.0;
  // Exact discrete solution of T * dtemp/dt = u - temp over one step.
  s.temperature = u + (s.temperature - u) * std::exp(-dt / p.time_constant);
  if (s.temperature > p.temp_threshold) s.tripped = true;

  return s;
}

bool combine_trips(std::span<const bool> trip_signals) {
  assert(!trip_signals.empty());
  for (bool t : trip_signals)
    if (t) return true;
  return false;
}

CapBankState step_capbank(const CapBankParams& p, CapBankState s,
                          double v_op) {
  if (v_op >= p.v_max) {
    s.status = CapBankStatus::kOff;
  } else if (v_op <= p.v_min) {
    s.status = CapBankStatus::kOn;
  }
  // Inside the band the status is unchanged.
  return s;
}

}  // namespace feedersim
