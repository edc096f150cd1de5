#include <stdexcept>

#include "feedersim/scenario.hpp"

namespace feedersim {

namespace {

ProtSet prots(const char* tags) {
  // "P2P4P5" style tag runs.
  ProtSet set;
  for (const char* c = tags; *c; ++c) {
    if (*c != 'P') continue;
    switch (*(c + 1)) {
      case '1': set.p1 = true; break;
      case '2': set.p2 = true; break;
      case '3': set.p3 = true; break;
      case '4': set.p4 = true; break;
      case '5': set.p5 = true; break;
      default: throw std::logic_error("bad protection tag string");
    }
  }
  return set;
}

TemplateDevice dev(const char* appliance, const char* equipment, MotorType t,
                   const char* tags, double kw) {
  return TemplateDevice{appliance, equipment, t, prots(tags), kw};
}

TemplateDevice zip(double kw) {
  return TemplateDevice{"Static", "Loads", MotorType::kStatic, ProtSet{}, kw};
}

std::vector<BuildingTemplate> make_templates() {
  using enum MotorType;
  std::vector<BuildingTemplate> t;

  t.push_back({"medium_retail",
               "Medium Retail",
               {
                   dev("RTU", "Fan", kMB, "P2P4P5", 15.38),
                   dev("RTU", "Compressor", kMA, "P2P4P5", 53.13),
                   dev("RTU", "Frac Condenser", kMD, "P3P4P5", 16.25),
                   dev("RTU", "Frac Ind Draft", kMD, "P3P4P5", 10.41),
                   dev("Exhaust", "Frac Fan", kMD, "P3P4P5", 0.92),
                   zip(41.18),
               }});

  t.push_back({"large_retail",
               "Large Retail",
               {
                   dev("RTU", "Fan", kMB, "P2P4P5", 46.15),
                   dev("RTU", "Compressor", kMA, "P2P4P5", 159.38),
                   dev("RTU", "Frac Condenser", kMD, "P3P4P5", 48.75),
                   dev("RTU", "Frac Ind Draft", kMD, "P3P4P5", 31.22),
                   dev("Exhaust", "Frac Fan", kMD, "P3P4P5", 1.38),
                   zip(122.95),
               }});

  t.push_back({"supermarket",
               "Supermarket",
               {
                   dev("RF", "Compressor", kMA, "P2P4", 42.5),
                   dev("RF", "Frac Fan", kMD, "P3", 17.0),
                   dev("Exhaust", "Frac Fan", kMD, "P3P4P5", 1.38),
                   dev("RTU", "Fan", kMB, "P2P4P5", 30.77),
                   dev("RTU", "Compressor", kMA, "P2P4P5", 106.25),
                   dev("RTU", "Frac Condenser", kMD, "P3P4P5", 32.5),
                   dev("RTU", "Frac Ind Draft", kMD, "P3P4P5", 20.81),
                   zip(107.66),
               }});

  t.push_back({"warehouse",
               "Warehouse",
               {
                   dev("Gas Heater", "Fan", kMD, "P3P4", 1.2),
                   dev("Exhaust", "Frac Fan", kMD, "P3P4", 24.62),
                   zip(11.07),
               }});

  t.push_back({"school",
               "School",
               {
                   dev("Chiller", "Compressor", kMA, "P1P4P5", 350.0),
                   dev("Chiller", "Pump", kMC, "P2P5", 98.0),
                   dev("Cool Tower", "Fan", kMB, "P2P4P5", 42.0),
                   dev("Fan Coil", "Fan", kMB, "P4P5", 6.15),
                   dev("Exhaust", "Fan", kMB, "P2P4P5", 1.29),
                   dev("Boilers", "Ind Draft", kMB, "P1P4P5", 83.25),
                   dev("Boilers", "Pump", kMC, "P2P5", 98.0),
                   dev("RTU", "Fan", kMB, "P2P4P5", 123.0),
                   dev("RTU", "Compressor", kMA, "P2P4P5", 425.0),
                   dev("RTU", "Frac Condenser", kMD, "P3P4P5", 130.0),
                   dev("RTU", "Frac Ind Draft", kMD, "P3P4P5", 83.25),
                   zip(617.12),
               }});

  t.push_back({"hotel",
               "Hotel",
               {
                   dev("PTAC", "Compressor", kMA, "P4", 425.0),
                   dev("PTAC", "Fan", kMD, "P3", 123.0),
                   dev("Exhaust", "Fan", kMD, "P3", 23.0),
                   dev("HWP", "Pump", kMD, "P3", 1.2),
                   dev("Split", "Fan", kMB, "P2P4", 123.0),
                   dev("Split", "Compressor", kMA, "P2P4", 425.0),
                   dev("Split", "Frac Condenser", kMD, "P3P4", 130.0),
                   dev("Split", "Frac Ind Draft", kMD, "P3P4", 83.25),
                   zip(571.48),
               }});

  return t;
}

}  // namespace

double BuildingTemplate::total_kw() const {
  double sum = 0.0;
  for (const auto& d : devices) sum += d.rating_kw;
  return sum;
}

const std::vector<BuildingTemplate>& builtin_templates() {
  static const std::vector<BuildingTemplate> templates = make_templates();
  return templates;
}

const BuildingTemplate& find_template(const std::string& name) {
  for (const auto& t : builtin_templates())
    if (t.name == name) return t;
  throw std::out_of_range("unknown building template '" + name + "'");
}

CompositionSummary composition_summary(
    const std::vector<BuildingTemplate>& templates) {
  CompositionSummary s;
  for (const auto& t : templates)
    for (const auto& d : t.devices)
      s.kw[static_cast<int>(d.motor_type)] += d.rating_kw;
  for (double v : s.kw) s.total_kw += v;
  if (s.total_kw > 0.0)
    for (int i = 0; i < 5; ++i) s.percent[i] = 100.0 * s.kw[i] / s.total_kw;
  return s;
}

CompositionSummary composition_summary(
    const std::vector<BuildingPlacement>& buildings) {
  CompositionSummary s;
  for (const auto& b : buildings) {
    const auto& t = find_template(b.template_name);
    for (const auto& d : t.devices)
      s.kw[static_cast<int>(d.motor_type)] += d.rating_kw * b.scale;
  }
  for (double v : s.kw) s.total_kw += v;
  if (s.total_kw > 0.0)
    for (int i = 0; i < 5; ++i) s.percent[i] = 100.0 * s.kw[i] / s.total_kw;
  return s;
}

std::vector<BuildingPlacement> scale_to_target(
    std::vector<BuildingPlacement> buildings, double target_mw) {
  if (target_mw <= 0.0)
    throw std::invalid_argument("target_mw must be positive");
  double total_kw = 0.0;
  for (const auto& b : buildings)
    total_kw += find_template(b.template_name).total_kw() * b.scale;
  if (total_kw <= 0.0)
    throw std::invalid_argument("building list has no load to scale");
  const double factor = target_mw * 1000.0 / total_kw;
  for (auto& b : buildings) b.scale *= factor;
  return buildings;
}

}  // namespace feedersim
