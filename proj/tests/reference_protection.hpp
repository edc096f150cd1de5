#pragma once

// Deliberately naive reference machines for the protection timing logic,
// kept separate from the library so the two implementations can be checked
// against each other state by state. Branch order and strict comparisons
// are part of the contract: trip logic first, then reconnection, then the
// trip-count latch, with the internal clock advancing after the body.

struct ReferenceVoltageProtection {
  // parameters
  bool activated = true;
  double work_time = 0.0;
  double v_trip = 0.8;
  double t_trip = 0.5;
  double v_rec = 0.95;
  double t_rec = 0.01;
  int max_trip_count = 2;

  // state
  double time = 0.0;
  double trip_timer = 0.0;
  double rec_timer = 0.0;
  int trip_counter = 0;
  bool prot_trip = false;

  bool step(double v_measured, double dt) {
    if (activated && time >= work_time) {
      if (v_measured < v_trip) {
        trip_timer = trip_timer + dt;
        if (trip_timer > t_trip) {
          if (prot_trip == false) trip_counter = trip_counter + 1;
          prot_trip = true;
        } else {
          prot_trip = false;
        }
      } else {
        trip_timer = 0.0;
      }
      if (prot_trip == true) {
        if (v_measured > v_rec) {
          rec_timer = rec_timer + dt;
          if (rec_timer > t_rec) {
            prot_trip = false;
            trip_timer = 0.0;
          }
        } else {
          rec_timer = 0.0;
        }
      }
      if (trip_counter >= max_trip_count) prot_trip = true;
    }
    time = time + dt;
    return prot_trip;
  }
};

// Same accumulate-and-reset delay with the comparison direction reversed,
// no reconnection block, and the trip count capped at one.
struct ReferenceOverloadProtection {
  double i_trip = 3.0;
  double t_trip = 0.04;

  double trip_timer = 0.0;
  int trip_counter = 0;
  bool prot_trip = false;

  bool step(double i_measured, double dt) {
    if (i_measured > i_trip) {
      trip_timer = trip_timer + dt;
      if (trip_timer > t_trip) {
        if (prot_trip == false) trip_counter = trip_counter + 1;
        prot_trip = true;
      } else {
        prot_trip = false;
      }
    } else {
      trip_timer = 0.0;
    }
    if (trip_counter >= 1) prot_trip = true;
    return prot_trip;
  }
};
