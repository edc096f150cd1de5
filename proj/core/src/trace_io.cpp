#include "feedersim/trace_io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "feedersim/version.hpp"

namespace feedersim {

namespace {

namespace fs = std::filesystem;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", x);
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out.is_open())
    throw std::runtime_error("cannot write " + p.string());
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

// Plain name if present, otherwise the ".partial" spelling; empty when
// neither exists.
fs::path pick_file(const fs::path& dir, const std::string& name) {
  const fs::path plain = dir / name;
  if (fs::exists(plain)) return plain;
  const fs::path partial = dir / (name + ".partial");
  if (fs::exists(partial)) return partial;
  return {};
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace

void write_trace(const SimulationTrace& trace, const std::string& dir,
                 bool deterministic) {
  const fs::path out_dir(dir);
  fs::create_directories(out_dir);
  const std::string suffix = trace.complete ? "" : ".partial";

  {
    std::ofstream out = open_out(out_dir / ("voltages.csv" + suffix));
    out << "time";
    for (const std::string& n : trace.node_names) out << ',' << n;
    out << '\n';
    for (std::size_t k = 0; k < trace.time.size(); ++k) {
      out << fmt(trace.time[k]);
      for (std::size_t n = 0; n < trace.node_names.size(); ++n)
        out << ',' << fmt(trace.node_voltage[n][k]);
      out << '\n';
    }
  }

  {
    std::ofstream out = open_out(out_dir / ("devices.csv" + suffix));
    out << "time,device,current_pu,connected,stalled,temperature\n";
    for (std::size_t k = 0; k < trace.time.size(); ++k)
      for (std::size_t d = 0; d < trace.device_ids.size(); ++d)
        out << fmt(trace.time[k]) << ',' << trace.device_ids[d] << ','
            << fmt(trace.device_current[d][k]) << ','
            << int(trace.device_connected[d][k]) << ','
            << int(trace.device_stalled[d][k]) << ','
            << fmt(trace.device_temperature[d][k]) << '\n';
  }

  {
    std::ofstream out = open_out(out_dir / ("events.csv" + suffix));
    out << "time,device,kind,cause\n";
    for (const TraceEvent& e : trace.events)
      out << fmt(e.time) << ',' << e.device << ',' << e.kind << ',' << e.cause
          << '\n';
  }

  nlohmann::ordered_json meta;
  meta["version"] = kVersion;
  meta["scenario_hash"] = trace.scenario_hash;
  meta["rng_seed"] = trace.seed;
  meta["dt"] = trace.dt;
  meta["steps"] = trace.time.size();
  meta["head_node"] = trace.head_node;
  meta["nodes"] = trace.node_names;
  meta["devices"] = trace.device_ids.size();
  meta["events"] = trace.events.size();
  meta["max_power_mismatch"] = trace.max_power_mismatch();
  meta["complete"] = trace.complete;
  if (!trace.complete) meta["abort_reason"] = trace.abort_reason;
  meta["warnings"] = trace.warnings;
  if (!deterministic) meta["generated_at"] = timestamp_utc();
  std::ofstream out = open_out(out_dir / "metadata.json");
  out << meta.dump(2) << '\n';
}

SimulationTrace read_trace_dir(const std::string& dir) {
  const fs::path in_dir(dir);
  SimulationTrace trace;

  {
    const fs::path meta_path = in_dir / "metadata.json";
    std::ifstream in(meta_path);
    if (!in.is_open())
      throw std::runtime_error("cannot read " + meta_path.string());
    nlohmann::json meta;
    try {
      in >> meta;
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error(meta_path.string() + ": " + e.what());
    }
    trace.dt = meta.value("dt", 1e-3);
    trace.seed = meta.value("rng_seed", std::uint64_t{0});
    trace.scenario_hash = meta.value("scenario_hash", std::string{});
    trace.head_node = meta.value("head_node", std::string{});
    trace.complete = meta.value("complete", true);
    trace.abort_reason = meta.value("abort_reason", std::string{});
    if (meta.contains("warnings"))
      trace.warnings = meta["warnings"].get<std::vector<std::string>>();
  }

  {
    const fs::path path = pick_file(in_dir, "voltages.csv");
    if (path.empty())
      throw std::runtime_error("no voltages.csv in " + in_dir.string());
    std::ifstream in(path);
    std::string line;
    if (!std::getline(in, line))
      throw std::runtime_error(path.string() + ": empty file");
    std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "time")
      throw std::runtime_error(path.string() + ": bad header");
    trace.node_names.assign(header.begin() + 1, header.end());
    trace.node_voltage.assign(trace.node_names.size(), {});
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const std::vector<std::string> fields = split_csv_line(line);
      if (fields.size() != header.size())
        throw std::runtime_error(path.string() + ": ragged row");
      trace.time.push_back(std::stod(fields[0]));
      for (std::size_t n = 0; n < trace.node_names.size(); ++n)
        trace.node_voltage[n].push_back(std::stod(fields[n + 1]));
    }
  }

  {
    const fs::path path = pick_file(in_dir, "events.csv");
    if (!path.empty()) {
      std::ifstream in(path);
      std::string line;
      std::getline(in, line);  // header
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 4)
          throw std::runtime_error(path.string() + ": ragged row");
        trace.events.push_back(
            {std::stod(fields[0]), fields[1], fields[2], fields[3]});
      }
    }
  }

  return trace;
}

void write_comparison_csv(const ComparisonReport& rep,
                          const std::string& path) {
  std::ofstream out = open_out(path);
  out << "time";
  for (const std::string& n : rep.nodes) out << ",dv_" << n;
  out << '\n';
  for (std::size_t k = 0; k < rep.time.size(); ++k) {
    out << fmt(rep.time[k]);
    for (std::size_t n = 0; n < rep.nodes.size(); ++n)
      out << ',' << fmt(rep.voltage_diff[n][k]);
    out << '\n';
  }
}

}  // namespace feedersim
