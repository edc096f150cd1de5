#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace feedersim {

using Complex = std::complex<double>;

constexpr double kNominalHz = 60.0;

// Convert a count of AC cycles to seconds at nominal frequency.
constexpr double cycles(double n) { return n / kNominalHz; }

// System-wide MVA base for per-unit conversion at the feeder level.
constexpr double kSystemBaseMva = 10.0;

struct TimeGrid {
  double dt = 1e-3;
  double duration = 10.0;

  std::size_t steps() const {
    return static_cast<std::size_t>(duration / dt + 0.5);
  }
};

}  // namespace feedersim
