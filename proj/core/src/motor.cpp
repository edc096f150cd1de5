#include "feedersim/motor.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace feedersim {

double electrical_torque(const MotorParams& p, double slip, double v_mag) {
  if (slip <= 0.0)
    throw std::domain_error("electrical_torque: slip must be positive");
  const double r2s = p.rotor_resistance / slip;
  const double rr = p.stator_resistance + r2s;
  const double xx = p.stator_reactance + p.rotor_reactance;
  return v_mag * v_mag * r2s / (rr * rr + xx * xx);
}

double load_torque(const MotorParams& p, double speed) {
  assert(speed >= 0.0 && speed <= 1.0);
  return p.torque_rated * std::pow(speed, p.load_torque_exponent);
}

double calibrate_rated_torque(const MotorParams& p, double rated_slip) {
  return electrical_torque(p, rated_slip, 1.0) /
         std::pow(1.0 - rated_slip, p.load_torque_exponent);
}

double steady_state_slip(const MotorParams& p, double v_mag) {
  // Peak torque sits at slip = R2 / |R1 + j(X1+X2)|; the stable equilibrium
  // is below it, where Te - Tm is increasing in slip.
  const double s_peak =
      p.rotor_resistance / std::hypot(p.stator_resistance,
                                      p.stator_reactance + p.rotor_reactance);
  auto imbalance = [&](double s) {
    return electrical_torque(p, s, v_mag) - load_torque(p, 1.0 - s);
  };
  double lo = kSlipMin;
  double hi = std::min(s_peak, 1.0);
  if (imbalance(lo) >= 0.0) return lo;
  if (imbalance(hi) <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (imbalance(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Complex motor_input_impedance(const MotorParams& p, double slip) {
  const Complex z_rotor(p.rotor_resistance / slip, p.rotor_reactance);
  const Complex z_mag(0.0, p.magnetizing_reactance);
  const Complex z_par = z_mag * z_rotor / (z_mag + z_rotor);
  return Complex(p.stator_resistance, p.stator_reactance) + z_par;
}

double motor_input_power_pu(const MotorParams& p, double slip, double v_mag) {
  const Complex z = motor_input_impedance(p, slip);
  return v_mag * v_mag * z.real() / std::norm(z);
}

Complex motor_drawn_current(const MotorParams& p, const MotorState& s,
                            Complex v_terminal) {
  if (!s.connected) return Complex(0.0, 0.0);
  if (p.motor_type != MotorType::kMD)
    return v_terminal / motor_input_impedance(p, s.slip);
  if (s.stalled) return v_terminal / Complex(p.r_stall, p.x_stall);
  const double v_mag = std::abs(v_terminal);
  if (v_mag <= 1e-12) return Complex(0.0, 0.0);
  const double q0 = std::sqrt(1.0 - p.power_factor * p.power_factor);
  const Complex s_drawn(p.power_factor * std::pow(v_mag, p.kp),
                        q0 * std::pow(v_mag, p.kq));
  return std::conj(s_drawn / v_terminal);
}

MotorState step_three_phase_motor(const MotorParams& p, MotorState s,
                                  Complex v_terminal, double dt) {
  assert(dt > 0.0);
  s.terminal_voltage = v_terminal;
  const double v_mag = std::abs(v_terminal);

  auto clamp_slip = [](double x) { return std::clamp(x, kSlipMin, 1.0); };
  // d(slip)/dt = (Tm - Te) / (2H); Te vanishes when disconnected.
  auto slip_rate = [&](double slip) {
    slip = clamp_slip(slip);
    const double tm = load_torque(p, 1.0 - slip);
    const double te = s.connected ? electrical_torque(p, slip, v_mag) : 0.0;
    return (tm - te) / (2.0 * p.inertia_h);
  };

  const double k1 = slip_rate(s.slip);
  const double k2 = slip_rate(clamp_slip(s.slip + dt * k1));
  s.slip = clamp_slip(s.slip + 0.5 * dt * (k1 + k2));

  s.drawn_current = motor_drawn_current(p, s, v_terminal);
  return s;
}

MotorState step_single_phase_motor(const MotorParams& p, MotorState s,
                                   Complex v_terminal, double dt) {
  assert(p.motor_type == MotorType::kMD);
  assert(dt > 0.0);
  s.terminal_voltage = v_terminal;

  if (!s.connected) {
    // A disconnected compressor restarts in running mode when re-energized.
    s.stalled = false;
    s.elapsed_under_stall_voltage = 0.0;
    s.drawn_current = Complex(0.0, 0.0);
    return s;
  }

  const double v_mag = std::abs(v_terminal);
  if (!s.stalled) {
    if (v_mag < p.stall_voltage) {
      s.elapsed_under_stall_voltage += dt;
      if (s.elapsed_under_stall_voltage >= p.stall_delay) s.stalled = true;
    } else {
      s.elapsed_under_stall_voltage = 0.0;
    }
  }

  s.drawn_current = motor_drawn_current(p, s, v_terminal);
  return s;
}

}  // namespace feedersim
