#include <benchmark/benchmark.h>

#include <string>

#include "feedersim/engine.hpp"
#include "feedersim/motor.hpp"
#include "feedersim/protection.hpp"
#include "feedersim/scenario.hpp"

namespace {

using namespace feedersim;

const std::string kScenarioA =
    std::string(FEEDERSIM_SCENARIO_DIR) + "/scenario_A.json";

void BM_VoltageProtectionStep(benchmark::State& state) {
  const VoltageProtectionParams p;
  ProtectionState s;
  double t = 0.0;
  for (auto _ : state) {
    s = step_voltage_protection(p, s, 0.7, t, 1e-3);
    t += 1e-3;
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_VoltageProtectionStep);

void BM_ThreePhaseMotorStep(benchmark::State& state) {
  MotorParams p;
  p.torque_rated = calibrate_rated_torque(p, kRatedSlip);
  MotorState s;
  for (auto _ : state) {
    s = step_three_phase_motor(p, s, Complex(0.95, 0.0), 1e-3);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_ThreePhaseMotorStep);

void BM_NetworkSolve(benchmark::State& state) {
  const Scenario sc = load_scenario(kScenarioA);
  NetworkSolver solver(sc.feeder, sc.source);
  const auto inj = [&](const Eigen::VectorXcd& v) {
    return Eigen::VectorXcd::Zero(v.size()).eval();
  };
  Eigen::VectorXcd v = solver.solve(inj, 0.0);
  for (auto _ : state) {
    v = solver.solve(inj, 0.0, &v);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_NetworkSolve);

void BM_EngineStep(benchmark::State& state) {
  Engine engine(load_scenario(kScenarioA));
  engine.initialize();
  for (auto _ : state) engine.step();
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EngineStep);

void BM_FullRun(benchmark::State& state) {
  const Scenario sc = load_scenario(kScenarioA);
  for (auto _ : state) {
    Engine engine(sc);
    const SimulationTrace t = engine.run();
    benchmark::DoNotOptimize(t.events.size());
  }
}
BENCHMARK(BM_FullRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
