#include "feedersim/scenario.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "feedersim/rng.hpp"

namespace feedersim {

using nlohmann::json;

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string slug(const std::string& text) {
  std::string out;
  bool pending_sep = false;
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) {
      if (pending_sep && !out.empty()) out.push_back('_');
      pending_sep = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      pending_sep = true;
    }
  }
  return out;
}

double sample_range(Rng& rng, const Range& r) { return rng.uniform(r.lo, r.hi); }

VoltageProtectionParams sample_voltage_prot(Rng& rng,
                                            const VoltageProtRanges& r) {
  VoltageProtectionParams p;
  p.v_trip = sample_range(rng, r.v_trip);
  p.t_trip = sample_range(rng, r.t_trip);
  p.v_rec = sample_range(rng, r.v_rec);
  p.t_rec = sample_range(rng, r.t_rec);
  p.max_trip_count = r.max_trip_count;
  return p;
}

// --- scenario file parsing -------------------------------------------------

struct Collector {
  std::vector<std::string>* problems;
  void operator()(const std::string& msg) const { problems->push_back(msg); }
};

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed, const Collector& fail) {
  if (!obj.is_object()) return;
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      fail(where + ": unknown key '" + key + "'");
}

double get_number(const json& obj, const std::string& key,
                  const std::string& where, double fallback,
                  const Collector& fail, bool required = false) {
  if (!obj.contains(key)) {
    if (required) fail(where + ": missing required key '" + key + "'");
    return fallback;
  }
  if (!obj[key].is_number()) {
    fail(where + "." + key + ": expected a number");
    return fallback;
  }
  return obj[key].get<double>();
}

std::string get_string(const json& obj, const std::string& key,
                       const std::string& where, const std::string& fallback,
                       const Collector& fail, bool required = false) {
  if (!obj.contains(key)) {
    if (required) fail(where + ": missing required key '" + key + "'");
    return fallback;
  }
  if (!obj[key].is_string()) {
    fail(where + "." + key + ": expected a string");
    return fallback;
  }
  return obj[key].get<std::string>();
}

Range get_range(const json& obj, const std::string& key,
                const std::string& where, Range fallback,
                const Collector& fail) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj[key];
  if (v.is_number()) {
    const double x = v.get<double>();
    return Range{x, x};
  }
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    Range r{v[0].get<double>(), v[1].get<double>()};
    if (r.lo > r.hi)
      fail(where + "." + key + ": range low bound exceeds high bound");
    return r;
  }
  fail(where + "." + key + ": expected a number or [low, high]");
  return fallback;
}

Complex get_impedance(const json& obj, const std::string& key,
                      const std::string& where, Complex fallback,
                      const Collector& fail, bool required = false) {
  if (!obj.contains(key)) {
    if (required) fail(where + ": missing required key '" + key + "'");
    return fallback;
  }
  const json& v = obj[key];
  if (!v.is_object()) {
    fail(where + "." + key + ": expected an object {r, x}");
    return fallback;
  }
  check_keys(v, where + "." + key, {"r", "x"}, fail);
  return Complex(get_number(v, "r", where + "." + key, 0.0, fail, true),
                 get_number(v, "x", where + "." + key, 0.0, fail, true));
}

void parse_feeder(const json& j, FeederModel& f, const Collector& fail) {
  check_keys(j, "feeder",
             {"base_mva", "source_node", "nodes", "branches", "transformers",
              "cap_banks", "base_kv"},
             fail);
  f.base_mva = get_number(j, "base_mva", "feeder", kSystemBaseMva, fail);
  f.source_node = get_string(j, "source_node", "feeder", "", fail, true);

  if (j.contains("nodes") && j["nodes"].is_array()) {
    for (const auto& n : j["nodes"]) {
      if (n.is_string())
        f.nodes.push_back(n.get<std::string>());
      else
        fail("feeder.nodes: entries must be strings");
    }
  } else {
    fail("feeder: missing required key 'nodes' (array of node ids)");
  }

  if (j.contains("branches")) {
    int i = 0;
    for (const auto& b : j["branches"]) {
      const std::string where = "feeder.branches[" + std::to_string(i++) + "]";
      check_keys(b, where, {"from", "to", "r", "x"}, fail);
      Branch br;
      br.from = get_string(b, "from", where, "", fail, true);
      br.to = get_string(b, "to", where, "", fail, true);
      br.z = Complex(get_number(b, "r", where, 0.0, fail, true),
                     get_number(b, "x", where, 0.0, fail, true));
      f.branches.push_back(br);
    }
  }
  if (j.contains("transformers")) {
    int i = 0;
    for (const auto& t : j["transformers"]) {
      const std::string where =
          "feeder.transformers[" + std::to_string(i++) + "]";
      check_keys(t, where, {"from", "to", "r", "x", "tap"}, fail);
      Transformer tr;
      tr.from = get_string(t, "from", where, "", fail, true);
      tr.to = get_string(t, "to", where, "", fail, true);
      tr.z = Complex(get_number(t, "r", where, 0.0, fail, true),
                     get_number(t, "x", where, 0.0, fail, true));
      tr.tap = get_number(t, "tap", where, 1.0, fail);
      f.transformers.push_back(tr);
    }
  }
  if (j.contains("cap_banks")) {
    int i = 0;
    for (const auto& c : j["cap_banks"]) {
      const std::string where = "feeder.cap_banks[" + std::to_string(i++) + "]";
      check_keys(c, where, {"node", "q_kvar", "v_max", "v_min"}, fail);
      CapBankInstallation cb;
      cb.node = get_string(c, "node", where, "", fail, true);
      cb.q_kvar = get_number(c, "q_kvar", where, 0.0, fail, true);
      cb.params.v_max = get_number(c, "v_max", where, 1.10, fail);
      cb.params.v_min = get_number(c, "v_min", where, 1.05, fail);
      f.cap_banks.push_back(cb);
    }
  }
  if (j.contains("base_kv")) {
    if (j["base_kv"].is_object())
      for (const auto& [node, kv] : j["base_kv"].items()) {
        if (kv.is_number())
          f.base_kv[node] = kv.get<double>();
        else
          fail("feeder.base_kv." + node + ": expected a number");
      }
    else
      fail("feeder.base_kv: expected an object");
  }
}

void parse_source(const json& j, SourceModel& s, const Collector& fail) {
  check_keys(j, "source", {"mode", "e_th", "z_th", "sags"}, fail);
  const std::string mode = get_string(j, "mode", "source", "thevenin", fail);
  if (mode == "stiff")
    s.mode = SourceMode::kStiff;
  else if (mode == "thevenin")
    s.mode = SourceMode::kThevenin;
  else
    fail("source.mode: must be 'stiff' or 'thevenin', got '" + mode + "'");
  s.e_th = Complex(get_number(j, "e_th", "source", 1.0, fail, true), 0.0);
  s.z_th = get_impedance(j, "z_th", "source", Complex(0.0, 0.0), fail,
                         s.mode == SourceMode::kThevenin);
  if (j.contains("sags")) {
    int i = 0;
    for (const auto& sag : j["sags"]) {
      const std::string where = "source.sags[" + std::to_string(i++) + "]";
      check_keys(sag, where, {"start", "end", "v"}, fail);
      SagInterval si;
      si.t_start = get_number(sag, "start", where, 0.0, fail, true);
      si.t_end = get_number(sag, "end", where, 0.0, fail, true);
      si.v_depressed = get_number(sag, "v", where, 0.0, fail, true);
      s.sag_schedule.push_back(si);
    }
  }
}

void parse_protections(const json& j, Scenario& sc, const Collector& fail) {
  check_keys(j, "protections", {"enabled", "ranges"}, fail);
  if (j.contains("enabled")) {
    check_keys(j["enabled"], "protections.enabled",
               {"P1", "P2", "P3", "P4", "P5"}, fail);
    for (const char* tag : {"P1", "P2", "P3", "P4", "P5"})
      if (j["enabled"].contains(tag)) {
        if (j["enabled"][tag].is_boolean())
          sc.protection_enabled[tag] = j["enabled"][tag].get<bool>();
        else
          fail(std::string("protections.enabled.") + tag +
               ": expected a boolean");
      }
  }
  if (!j.contains("ranges")) return;
  const json& r = j["ranges"];
  check_keys(r, "protections.ranges", {"P1", "P2", "P3", "P4", "P5"}, fail);

  auto parse_voltage_ranges = [&](const char* tag, VoltageProtRanges& out) {
    if (!r.contains(tag)) return;
    const json& v = r[tag];
    const std::string where = std::string("protections.ranges.") + tag;
    check_keys(v, where,
               {"v_trip", "t_trip", "v_rec", "t_rec", "max_trip_count"},
               fail);
    out.v_trip = get_range(v, "v_trip", where, out.v_trip, fail);
    out.t_trip = get_range(v, "t_trip", where, out.t_trip, fail);
    out.v_rec = get_range(v, "v_rec", where, out.v_rec, fail);
    out.t_rec = get_range(v, "t_rec", where, out.t_rec, fail);
    if (v.contains("max_trip_count")) {
      if (v["max_trip_count"].is_number_integer())
        out.max_trip_count = v["max_trip_count"].get<int>();
      else
        fail(where + ".max_trip_count: expected an integer");
    }
  };
  parse_voltage_ranges("P1", sc.ranges.p1);
  parse_voltage_ranges("P4", sc.ranges.p4);
  parse_voltage_ranges("P5", sc.ranges.p5);

  if (r.contains("P2")) {
    check_keys(r["P2"], "protections.ranges.P2", {"i_trip", "t_trip"}, fail);
    sc.ranges.p2_i_trip = get_range(r["P2"], "i_trip", "protections.ranges.P2",
                                    sc.ranges.p2_i_trip, fail);
    sc.ranges.p2_t_trip = get_range(r["P2"], "t_trip", "protections.ranges.P2",
                                    sc.ranges.p2_t_trip, fail);
  }
  if (r.contains("P3")) {
    check_keys(r["P3"], "protections.ranges.P3",
               {"temp_threshold", "time_constant", "r_stall", "x_stall"},
               fail);
    sc.ranges.p3_temp_threshold =
        get_range(r["P3"], "temp_threshold", "protections.ranges.P3",
                  sc.ranges.p3_temp_threshold, fail);
    sc.ranges.p3_time_constant =
        get_range(r["P3"], "time_constant", "protections.ranges.P3",
                  sc.ranges.p3_time_constant, fail);
    sc.ranges.p3_r_stall = get_range(r["P3"], "r_stall",
                                     "protections.ranges.P3",
                                     sc.ranges.p3_r_stall, fail);
    sc.ranges.p3_x_stall = get_range(r["P3"], "x_stall",
                                     "protections.ranges.P3",
                                     sc.ranges.p3_x_stall, fail);
  }
}

void parse_simulation(const json& j, Scenario& sc, const Collector& fail) {
  check_keys(j, "simulation",
             {"duration", "dt", "rng_seed", "settling_hold", "target_mw",
              "zip"},
             fail);
  sc.duration = get_number(j, "duration", "simulation", 10.0, fail, true);
  sc.dt = get_number(j, "dt", "simulation", 1e-3, fail, true);
  if (j.contains("rng_seed")) {
    if (j["rng_seed"].is_number_unsigned() || j["rng_seed"].is_number_integer())
      sc.rng_seed = j["rng_seed"].get<std::uint64_t>();
    else
      fail("simulation.rng_seed: expected an integer");
  } else {
    sc.warnings.push_back("simulation.rng_seed not specified; defaulting to 0");
  }
  sc.settling_hold =
      get_number(j, "settling_hold", "simulation", sc.settling_hold, fail);
  if (j.contains("target_mw"))
    sc.target_mw = get_number(j, "target_mw", "simulation", 0.0, fail);
  if (j.contains("zip")) {
    const json& z = j["zip"];
    check_keys(z, "simulation.zip", {"a_z", "a_i", "a_p", "power_factor"},
               fail);
    sc.zip.a_z = get_number(z, "a_z", "simulation.zip", sc.zip.a_z, fail);
    sc.zip.a_i = get_number(z, "a_i", "simulation.zip", sc.zip.a_i, fail);
    sc.zip.a_p = get_number(z, "a_p", "simulation.zip", sc.zip.a_p, fail);
    sc.zip.power_factor = get_number(z, "power_factor", "simulation.zip",
                                     sc.zip.power_factor, fail);
  }
}

void parse_buildings(const json& j, Scenario& sc, const Collector& fail) {
  if (!j.is_array()) {
    fail("buildings: expected an array");
    return;
  }
  int i = 0;
  for (const auto& b : j) {
    const std::string where = "buildings[" + std::to_string(i++) + "]";
    check_keys(b, where, {"template", "node", "scale", "name"}, fail);
    BuildingPlacement p;
    p.template_name = get_string(b, "template", where, "", fail, true);
    p.node = get_string(b, "node", where, "", fail, true);
    p.scale = get_number(b, "scale", where, 1.0, fail);
    p.instance_name = get_string(b, "name", where, p.template_name, fail);
    sc.buildings.push_back(p);
  }
}

void validate_semantics(Scenario& sc, const Collector& fail) {
  for (const auto& p : feeder_problems(sc.feeder)) fail("feeder: " + p);

  if (sc.source.mode == SourceMode::kThevenin &&
      std::abs(sc.source.z_th) == 0.0)
    fail("source: thevenin mode requires a nonzero z_th");
  if (sc.source.mode == SourceMode::kStiff && std::abs(sc.source.e_th) == 0.0)
    fail("source: e_th must be nonzero");

  auto sags = sc.source.sag_schedule;
  std::sort(sags.begin(), sags.end(),
            [](const SagInterval& a, const SagInterval& b) {
              return a.t_start < b.t_start;
            });
  for (std::size_t i = 0; i < sags.size(); ++i) {
    std::ostringstream name;
    name << "sag [" << sags[i].t_start << ", " << sags[i].t_end << ")";
    if (sags[i].t_start >= sags[i].t_end)
      fail("source: " + name.str() + " is empty or reversed");
    if (sags[i].v_depressed < 0.0)
      fail("source: " + name.str() + " has negative voltage");
    if (i > 0 && sags[i].t_start < sags[i - 1].t_end) {
      std::ostringstream prev;
      prev << "sag [" << sags[i - 1].t_start << ", " << sags[i - 1].t_end
           << ")";
      fail("source: " + name.str() + " overlaps " + prev.str());
    }
  }
  if (!sags.empty() && sags.front().t_start < sc.settling_hold)
    sc.warnings.push_back(
        "first sag begins before the settling hold of " +
        std::to_string(sc.settling_hold) + " s; pre-event state may not be "
        "fully settled");

  if (sc.buildings.empty()) fail("buildings: at least one building required");
  std::set<std::string> instance_names;
  std::set<std::string> known_nodes(sc.feeder.nodes.begin(),
                                    sc.feeder.nodes.end());
  for (const auto& b : sc.buildings) {
    try {
      find_template(b.template_name);
    } catch (const std::out_of_range&) {
      fail("buildings: unknown template '" + b.template_name + "'");
    }
    if (!known_nodes.count(b.node))
      fail("buildings: instance '" + b.instance_name +
           "' placed at unknown node '" + b.node + "'");
    if (b.scale <= 0.0)
      fail("buildings: instance '" + b.instance_name +
           "' has non-positive scale");
    if (!instance_names.insert(b.instance_name).second)
      fail("buildings: duplicate instance name '" + b.instance_name + "'");
  }

  auto check_voltage_ranges = [&](const char* tag,
                                  const VoltageProtRanges& r) {
    const std::string where = std::string("protections.ranges.") + tag;
    if (r.v_trip.lo > r.v_trip.hi || r.t_trip.lo > r.t_trip.hi ||
        r.v_rec.lo > r.v_rec.hi || r.t_rec.lo > r.t_rec.hi)
      fail(where + ": reversed range");
    if (r.v_rec.lo < r.v_trip.hi)
      fail(where + ": v_rec range must sit at or above the v_trip range");
    if (r.t_trip.lo < 0.0 || r.t_rec.lo < 0.0)
      fail(where + ": delays must be non-negative");
    if (r.max_trip_count < 1) fail(where + ": max_trip_count must be >= 1");
  };
  check_voltage_ranges("P1", sc.ranges.p1);
  check_voltage_ranges("P4", sc.ranges.p4);
  check_voltage_ranges("P5", sc.ranges.p5);
  if (sc.ranges.p2_i_trip.lo <= 1.0)
    fail("protections.ranges.P2: i_trip must exceed 1 pu");
  if (sc.ranges.p2_t_trip.lo < 0.0)
    fail("protections.ranges.P2: t_trip must be non-negative");
  if (sc.ranges.p3_temp_threshold.lo <= 0.0)
    fail("protections.ranges.P3: temp_threshold must be positive");
  if (sc.ranges.p3_time_constant.lo <= 0.0)
    fail("protections.ranges.P3: time_constant must be positive");
  if (sc.ranges.p3_r_stall.lo <= 0.0)
    fail("protections.ranges.P3: r_stall must be positive");

  const double zip_sum = sc.zip.a_z + sc.zip.a_i + sc.zip.a_p;
  if (std::abs(zip_sum - 1.0) > 1e-9)
    fail("simulation.zip: a_z + a_i + a_p must equal 1 (got " +
         std::to_string(zip_sum) + ")");
  if (sc.zip.a_z < 0.0 || sc.zip.a_i < 0.0 || sc.zip.a_p < 0.0)
    fail("simulation.zip: fractions must be non-negative");
  if (sc.zip.power_factor <= 0.0 || sc.zip.power_factor > 1.0)
    fail("simulation.zip: power_factor must be in (0, 1]");

  if (sc.dt <= 0.0) fail("simulation.dt must be positive");
  if (sc.duration <= sc.dt)
    fail("simulation.duration must exceed simulation.dt");
  if (sc.target_mw && *sc.target_mw <= 0.0)
    fail("simulation.target_mw must be positive");
}

}  // namespace

ProtectionAssignment sample_device_protections(const ProtectionRanges& ranges,
                                               std::uint64_t seed,
                                               const std::string& device_id,
                                               const ProtSet& wanted) {
  ProtectionAssignment a;
  a.present = wanted;
  if (wanted.p1) {
    Rng rng(Rng::mix(seed, device_id + ":P1"));
    a.p1 = sample_voltage_prot(rng, ranges.p1);
  }
  if (wanted.p2) {
    Rng rng(Rng::mix(seed, device_id + ":P2"));
    a.p2.i_trip = sample_range(rng, ranges.p2_i_trip);
    a.p2.t_trip = sample_range(rng, ranges.p2_t_trip);
  }
  if (wanted.p3) {
    Rng rng(Rng::mix(seed, device_id + ":P3"));
    a.p3.temp_threshold = sample_range(rng, ranges.p3_temp_threshold);
    a.p3.time_constant = sample_range(rng, ranges.p3_time_constant);
    a.p3.r_stall = sample_range(rng, ranges.p3_r_stall);
    a.stall_x = sample_range(rng, ranges.p3_x_stall);
  }
  if (wanted.p4) {
    Rng rng(Rng::mix(seed, device_id + ":P4"));
    a.p4 = sample_voltage_prot(rng, ranges.p4);
  }
  if (wanted.p5) {
    Rng rng(Rng::mix(seed, device_id + ":P5"));
    a.p5 = sample_voltage_prot(rng, ranges.p5);
  }
  return a;
}

void rebuild_devices(Scenario& sc) {
  sc.devices.clear();
  sc.zip_loads.clear();
  sc.feeder.attachments.clear();

  for (const auto& placement : sc.buildings) {
    const BuildingTemplate& tpl = find_template(placement.template_name);
    for (const auto& row : tpl.devices) {
      if (row.motor_type == MotorType::kStatic) {
        const double p_kw = row.rating_kw * placement.scale;
        const double pf = sc.zip.power_factor;
        const double q_kvar = p_kw * std::tan(std::acos(pf));
        ZipLoad load;
        load.s0_kva = Complex(p_kw, q_kvar);
        load.a_z = sc.zip.a_z;
        load.a_i = sc.zip.a_i;
        load.a_p = sc.zip.a_p;
        sc.zip_loads.emplace_back(placement.node, load);
        sc.feeder.attachments[placement.instance_name + ".static_loads"] =
            placement.node;
        continue;
      }

      Device d;
      d.id = placement.instance_name + "." + slug(row.appliance) + "_" +
             slug(row.equipment);
      d.node = placement.node;

      MotorParams& m = d.motor;
      m.motor_type = row.motor_type;
      m.rated_power_kw = row.rating_kw * placement.scale;
      switch (row.motor_type) {
        case MotorType::kMA:
          m.inertia_h = 0.1;
          m.load_torque_exponent = 0.0;
          break;
        case MotorType::kMB:
          m.inertia_h = 0.5;
          m.load_torque_exponent = 2.0;
          break;
        case MotorType::kMC:
          m.inertia_h = 0.1;
          m.load_torque_exponent = 2.0;
          break;
        case MotorType::kMD:
        case MotorType::kStatic:
          break;
      }

      // Sample the thermal/stall block for every kMD motor even when no
      // thermal relay is fitted: the stall impedance is a motor property.
      ProtSet sample_set = row.protections;
      auto enabled = [&](const char* tag) {
        auto it = sc.protection_enabled.find(tag);
        return it == sc.protection_enabled.end() || it->second;
      };
      sample_set.p1 &= enabled("P1");
      sample_set.p2 &= enabled("P2");
      sample_set.p3 &= enabled("P3");
      sample_set.p4 &= enabled("P4");
      sample_set.p5 &= enabled("P5");
      const bool fit_p3 = sample_set.p3;
      if (m.motor_type == MotorType::kMD) sample_set.p3 = true;

      d.protections =
          sample_device_protections(sc.ranges, sc.rng_seed, d.id, sample_set);
      d.protections.present.p3 = fit_p3;

      if (m.motor_type == MotorType::kMD) {
        m.r_stall = d.protections.p3.r_stall;
        m.x_stall = d.protections.stall_x;
        d.base_mva = m.rated_power_kw / 1000.0 / m.power_factor;
      } else {
        m.torque_rated = calibrate_rated_torque(m, kRatedSlip);
        d.base_mva = m.rated_power_kw / 1000.0 /
                     motor_input_power_pu(m, kRatedSlip, 1.0);
      }

      sc.feeder.attachments[d.id] = d.node;
      sc.devices.push_back(std::move(d));
    }
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ScenarioError("cannot open scenario file '" + path + "'",
                        {"cannot open scenario file '" + path + "'"});
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();

  json root;
  try {
    root = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario parse error: ") + e.what(),
                        {e.what()});
  }

  Scenario sc;
  sc.source_path = path;
  sc.scenario_hash = fnv1a_hex(bytes);

  std::vector<std::string> problems;
  Collector fail{&problems};

  check_keys(root, "scenario",
             {"feeder", "source", "buildings", "protections", "simulation"},
             fail);
  for (const char* section :
       {"feeder", "source", "buildings", "protections", "simulation"})
    if (!root.contains(section))
      fail(std::string("scenario: missing required section '") + section +
           "'");

  if (root.contains("feeder")) parse_feeder(root["feeder"], sc.feeder, fail);
  if (root.contains("source")) parse_source(root["source"], sc.source, fail);
  if (root.contains("buildings")) parse_buildings(root["buildings"], sc, fail);
  if (root.contains("protections"))
    parse_protections(root["protections"], sc, fail);
  if (root.contains("simulation"))
    parse_simulation(root["simulation"], sc, fail);

  if (problems.empty()) validate_semantics(sc, fail);

  if (!problems.empty()) {
    std::ostringstream oss;
    oss << "scenario '" << path << "' is invalid:";
    for (const auto& p : problems) oss << "\n  - " << p;
    throw ScenarioError(oss.str(), problems);
  }

  if (sc.target_mw) sc.buildings = scale_to_target(sc.buildings, *sc.target_mw);
  rebuild_devices(sc);
  return sc;
}

}  // namespace feedersim
