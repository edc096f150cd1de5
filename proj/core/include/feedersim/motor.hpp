#pragma once

#include "feedersim/types.hpp"

namespace feedersim {

enum class MotorType { kMA, kMB, kMC, kMD, kStatic };

// Slip below which the rotor branch R2/slip is considered degenerate; the
// integrator clamps slip to [kSlipMin, 1].
constexpr double kSlipMin = 1e-4;

// Operating slip at rated voltage used to calibrate the load torque so that
// torque balance lands exactly here at v = 1.
constexpr double kRatedSlip = 0.02;

struct MotorParams {
  MotorType motor_type = MotorType::kMA;
  double rated_power_kw = 100.0;
  double rated_voltage = 1.0;          // pu
  double stator_resistance = 0.04;     // pu
  double stator_reactance = 0.12;      // pu
  double magnetizing_reactance = 2.4;  // pu
  double rotor_resistance = 0.02;      // pu
  double rotor_reactance = 0.12;       // pu
  double inertia_h = 0.1;              // s
  double load_torque_exponent = 0.0;   // 0 constant torque, 2 quadratic
  double torque_rated = 0.0;           // pu at rated speed; see calibrate_rated_torque

  // Single-phase performance model (kMD only).
  double kp = 1.0;             // exponent of P on voltage
  double kq = 2.0;             // exponent of Q on voltage
  double power_factor = 0.95;  // running power factor at v = 1
  double stall_voltage = 0.6;  // pu; below this the stall timer runs
  double stall_delay = 0.032;  // s of continuous undervoltage before stall
  double r_stall = 0.054;      // pu, stall-mode series impedance
  double x_stall = 0.092;      // pu
};

struct MotorState {
  double slip = kRatedSlip;    // in [0, 1]; meaningless for kMD
  bool connected = true;
  bool stalled = false;        // kMD only; cleared by disconnection
  Complex terminal_voltage{1.0, 0.0};
  Complex drawn_current{0.0, 0.0};  // pu on the motor's own base
  double elapsed_under_stall_voltage = 0.0;  // s
};

// Air-gap torque of the series equivalent circuit (magnetizing branch
// neglected for torque), pu on the motor base. Throws std::domain_error when
// slip <= 0; callers clamp to kSlipMin.
double electrical_torque(const MotorParams& p, double slip, double v_mag);

// Mechanical load torque torque_rated * speed^load_torque_exponent.
double load_torque(const MotorParams& p, double speed);

// torque_rated value that puts the torque balance exactly at rated_slip
// under v = 1.
double calibrate_rated_torque(const MotorParams& p, double rated_slip);

// Stable equilibrium slip (the root below peak-torque slip) where electrical
// and load torque balance at the given voltage. Returns NaN when the load
// exceeds peak torque and no equilibrium exists.
double steady_state_slip(const MotorParams& p, double v_mag);

// Input impedance of the full equivalent circuit including the magnetizing
// branch; used for the drawn current.
Complex motor_input_impedance(const MotorParams& p, double slip);

// Active power drawn at the given operating point, pu on the motor base.
double motor_input_power_pu(const MotorParams& p, double slip, double v_mag);

// Current drawn at terminal voltage v for the frozen internal state
// (slip / stall mode / connection), pu on the motor base. This is the
// voltage-to-current map the network solver iterates against within a step.
Complex motor_drawn_current(const MotorParams& p, const MotorState& s,
                            Complex v_terminal);

// One integration step (second-order explicit) of the slip dynamics
// d(speed)/dt = (Te - Tm)/(2H) under a terminal voltage held constant over
// the step. Disconnected motors coast down under load torque alone and draw
// no current.
MotorState step_three_phase_motor(const MotorParams& p, MotorState s,
                                  Complex v_terminal, double dt);

// Performance-model step for kMD: running, the drawn complex power is
// P0*v^kp + j*Q0*v^kq on the motor base (|S| = 1 at v = 1); after
// stall_delay seconds of continuous voltage below stall_voltage the motor
// latches into stall and draws v/(r_stall + j*x_stall). Stall clears only
// through disconnection.
MotorState step_single_phase_motor(const MotorParams& p, MotorState s,
                                   Complex v_terminal, double dt);

}  // namespace feedersim
