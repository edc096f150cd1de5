#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "feedersim/motor.hpp"
#include "feedersim/network.hpp"
#include "feedersim/protection.hpp"
#include "feedersim/types.hpp"

namespace feedersim {

// Which of the five protections a device carries.
struct ProtSet {
  bool p1 = false;  // electronic relay
  bool p2 = false;  // current overload
  bool p3 = false;  // thermal
  bool p4 = false;  // contactor
  bool p5 = false;  // building management system
};

struct TemplateDevice {
  std::string appliance;
  std::string equipment;
  MotorType motor_type = MotorType::kMA;
  ProtSet protections;
  double rating_kw = 0.0;
};

struct BuildingTemplate {
  std::string name;  // slug, e.g. "medium_retail"
  std::string display_name;
  std::vector<TemplateDevice> devices;

  double total_kw() const;
};

// The six built-in commercial building compositions.
const std::vector<BuildingTemplate>& builtin_templates();

// Template lookup by slug; throws std::out_of_range when unknown.
const BuildingTemplate& find_template(const std::string& name);

struct CompositionSummary {
  // Indexed by MotorType order kMA, kMB, kMC, kMD, kStatic.
  std::array<double, 5> kw{};
  std::array<double, 5> percent{};
  double total_kw = 0.0;

  double kw_of(MotorType t) const { return kw[static_cast<int>(t)]; }
  double percent_of(MotorType t) const {
    return percent[static_cast<int>(t)];
  }
};

CompositionSummary composition_summary(
    const std::vector<BuildingTemplate>& templates);

struct BuildingPlacement {
  std::string template_name;
  std::string node;
  double scale = 1.0;
  std::string instance_name;  // defaults to the template slug
};

// Summary across placements with their scale factors applied.
CompositionSummary composition_summary(
    const std::vector<BuildingPlacement>& buildings);

// Uniformly rescales every placement so the total equals target_mw;
// composition percentages are unchanged.
std::vector<BuildingPlacement> scale_to_target(
    std::vector<BuildingPlacement> buildings, double target_mw);

// Closed sampling interval; lo == hi pins the value.
struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct VoltageProtRanges {
  Range v_trip;
  Range t_trip;
  Range v_rec;
  Range t_rec;
  int max_trip_count = 1;
};

struct ProtectionRanges {
  VoltageProtRanges p1{{0.8, 0.9}, {cycles(20.0), 2.0}, {0.95, 0.95},
                       {0.01, 0.01}, 2};
  Range p2_i_trip{3.0, 3.0};
  Range p2_t_trip{0.04, 0.04};
  Range p3_temp_threshold{0.15, 0.15};
  Range p3_time_constant{10.0, 10.0};
  Range p3_r_stall{0.054, 0.086};
  Range p3_x_stall{0.092, 0.092};
  VoltageProtRanges p4{{0.4, 0.6}, {cycles(1.0), cycles(5.0)}, {0.65, 0.70},
                       {cycles(2.0), cycles(8.5)}, 10};
  VoltageProtRanges p5{{0.5, 0.6}, {cycles(13.0), cycles(15.0)}, {0.95, 0.95},
                       {2.0, 2.0}, 10};
};

// Parameter set of every protection a concrete device carries.
struct ProtectionAssignment {
  ProtSet present;
  VoltageProtectionParams p1;
  OverloadParams p2;
  ThermalParams p3;
  VoltageProtectionParams p4;
  VoltageProtectionParams p5;
  // Drawn together with p3.r_stall; the stall impedance of a kMD motor must
  // match what its thermal image integrates.
  double stall_x = 0.092;
};

// Draws the parameters of the given protections for one device. The stream
// is keyed by (seed, device_id, protection tag), so the result does not
// depend on the order devices are enumerated in. For kMD devices the thermal
// r_stall/x_stall pair is also what the motor's stall impedance must use.
ProtectionAssignment sample_device_protections(const ProtectionRanges& ranges,
                                               std::uint64_t seed,
                                               const std::string& device_id,
                                               const ProtSet& wanted);

// A simulatable device: one Table-style motor row placed at a feeder node.
struct Device {
  std::string id;    // "<building>.<appliance>_<equipment>"
  std::string node;  // LV node the motor is attached to
  MotorParams motor;
  double base_mva = 0.0;  // the motor's own power base
  ProtectionAssignment protections;
};

struct ZipDefaults {
  double a_z = 0.4;
  double a_i = 0.3;
  double a_p = 0.3;
  double power_factor = 0.95;
};

struct Scenario {
  FeederModel feeder;
  SourceModel source;
  std::vector<BuildingPlacement> buildings;
  std::map<std::string, bool> protection_enabled;  // keys P1..P5
  ProtectionRanges ranges;
  std::uint64_t rng_seed = 0;
  double duration = 10.0;
  double dt = 1e-3;
  double settling_hold = 0.5;  // s before the first scheduled event
  ZipDefaults zip;
  std::optional<double> target_mw;

  // Assembled by rebuild_devices():
  std::vector<Device> devices;
  std::vector<std::pair<std::string, ZipLoad>> zip_loads;  // node, load

  std::vector<std::string> warnings;  // surfaced into run metadata
  std::string source_path;
  std::string scenario_hash;  // FNV-1a 64 of the file bytes, hex
};

// Thrown by load_scenario; `problems` lists every violation found.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string what, std::vector<std::string> problem_list)
      : std::runtime_error(std::move(what)),
        problems(std::move(problem_list)) {}

  std::vector<std::string> problems;
};

// Parses and validates a scenario file; every semantic violation is
// collected and reported together. Unknown keys anywhere are rejected.
Scenario load_scenario(const std::string& path);

// (Re)instantiates devices and ZIP loads from the placements, sampling
// protection parameters from scenario.rng_seed. Called by load_scenario;
// call again after overriding the seed.
void rebuild_devices(Scenario& scenario);

// FNV-1a 64-bit over a byte string, lowercase hex.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace feedersim
