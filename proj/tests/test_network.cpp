#include "doctest.h"

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "feedersim/network.hpp"

using namespace feedersim;

namespace {

// Line + boosting transformer + switched cap bank: the smallest model that
// exercises every stamp kind.
FeederModel three_node_model() {
  FeederModel f;
  f.nodes = {"A", "B", "C"};
  f.source_node = "A";
  f.branches.push_back({"A", "B", Complex(0.01, 0.1)});
  Transformer t;
  t.from = "B";
  t.to = "C";
  t.z = Complex(0.0, 0.2);
  t.tap = 2.0;
  f.transformers.push_back(t);
  CapBankInstallation cb;
  cb.node = "C";
  cb.q_kvar = 600.0;
  f.cap_banks.push_back(cb);
  return f;
}

bool mentions(const std::vector<std::string>& problems,
              const std::string& fragment) {
  for (const auto& p : problems)
    if (p.find(fragment) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("admittance stamps for a line, a tapped transformer, and a cap bank") {
  const FeederModel f = three_node_model();
  const Complex y1 = 1.0 / Complex(0.01, 0.1);
  const Complex yt = 1.0 / Complex(0.0, 0.2);

  const Eigen::MatrixXcd y = build_admittance(f, {});  // missing key = on
  REQUIRE(y.rows() == 3);
  CHECK(std::abs(y(0, 0) - y1) < 1e-14);
  CHECK(std::abs(y(0, 1) + y1) < 1e-14);
  CHECK(std::abs(y(1, 0) + y1) < 1e-14);
  // Primary-side diagonal picks up y/t^2, secondary y, coupling -y/t.
  CHECK(std::abs(y(1, 1) - (y1 + yt / 4.0)) < 1e-14);
  CHECK(std::abs(y(1, 2) + yt / 2.0) < 1e-14);
  CHECK(std::abs(y(2, 1) + yt / 2.0) < 1e-14);
  // 600 kvar on the 10 MVA system base is +j0.06 shunt while on.
  CHECK(std::abs(y(2, 2) - (yt + Complex(0.0, 0.06))) < 1e-14);

  const Eigen::MatrixXcd y_off =
      build_admittance(f, {{"C", CapBankStatus::kOff}});
  CHECK(std::abs(y_off(2, 2) - yt) < 1e-14);
  CHECK(std::abs(y_off(1, 1) - y(1, 1)) < 1e-14);
}

TEST_CASE("no-load secondary voltage is the primary divided by the tap") {
  FeederModel f;
  f.nodes = {"hv", "lv"};
  f.source_node = "hv";
  Transformer t;
  t.from = "hv";
  t.to = "lv";
  t.z = Complex(0.001, 0.01);
  t.tap = 0.97;  // boosting tap on a distribution transformer
  f.transformers.push_back(t);

  SourceModel src;
  src.mode = SourceMode::kStiff;
  src.e_th = Complex(1.0, 0.0);
  const auto v = solve_network(
      f, src, [](const Eigen::VectorXcd& x) {
        return Eigen::VectorXcd::Zero(x.size()).eval();
      },
      0.0);
  CHECK(std::abs(v(1) - Complex(1.0 / 0.97, 0.0)) < 1e-9);
}

TEST_CASE("zip power interpolates impedance, current, and power fractions") {
  ZipLoad load;
  load.s0_kva = Complex(100.0, 50.0);
  const Complex s = zip_power(load, 0.8);
  const double scale = 0.4 * 0.64 + 0.3 * 0.8 + 0.3;  // 0.796
  CHECK(s.real() == doctest::Approx(100.0 * scale).epsilon(1e-14));
  CHECK(s.imag() == doctest::Approx(50.0 * scale).epsilon(1e-14));
  CHECK(zip_power(load, 1.0) == load.s0_kva);
}

TEST_CASE("sag intervals are closed at the start and open at the end") {
  SourceModel src;
  src.e_th = Complex(1.02, 0.0);
  src.sag_schedule.push_back({1.0, 1.1, 0.35});
  CHECK(apply_sag(src, 0.999) == Complex(1.02, 0.0));
  CHECK(apply_sag(src, 1.0) == Complex(0.35, 0.0));
  CHECK(apply_sag(src, 1.0999) == Complex(0.35, 0.0));
  CHECK(apply_sag(src, 1.1) == Complex(1.02, 0.0));
}

TEST_CASE("stiff two-node divider matches the analytic solution") {
  FeederModel f;
  f.nodes = {"S", "L"};
  f.source_node = "S";
  const Complex z(0.05, 0.2);
  f.branches.push_back({"S", "L", z});

  SourceModel src;
  src.mode = SourceMode::kStiff;
  src.e_th = Complex(1.0, 0.0);

  const Complex y_load(1.2, -0.5);  // constant shunt admittance at L
  const auto inj = [&](const Eigen::VectorXcd& v) {
    Eigen::VectorXcd i = Eigen::VectorXcd::Zero(v.size());
    i(1) = -v(1) * y_load;
    return i;
  };
  SolveOptions opt;
  opt.tolerance = 1e-10;
  opt.max_iterations = 200;
  const auto v = solve_network(f, src, inj, 0.0, {}, opt);

  const Complex y1 = 1.0 / z;
  const Complex expected = src.e_th * y1 / (y1 + y_load);
  CHECK(std::abs(v(0) - src.e_th) < 1e-12);
  CHECK(std::abs(v(1) - expected) < 1e-8);
}

TEST_CASE("a thevenin source with no load holds every node at e_th") {
  FeederModel f;
  f.nodes = {"A", "B"};
  f.source_node = "A";
  f.branches.push_back({"A", "B", Complex(0.01, 0.06)});

  SourceModel src;
  src.mode = SourceMode::kThevenin;
  src.e_th = Complex(1.02, 0.0);
  src.z_th = Complex(0.004, 0.04);
  const auto v = solve_network(
      f, src, [](const Eigen::VectorXcd& x) {
        return Eigen::VectorXcd::Zero(x.size()).eval();
      },
      0.0);
  CHECK(std::abs(v(0) - src.e_th) < 1e-9);
  CHECK(std::abs(v(1) - src.e_th) < 1e-9);
}

TEST_CASE("deeper sags depress the loaded feeder monotonically") {
  FeederModel f;
  f.nodes = {"A", "B"};
  f.source_node = "A";
  f.branches.push_back({"A", "B", Complex(0.02, 0.12)});
  const Complex y_load(0.8, -0.3);
  const auto inj = [&](const Eigen::VectorXcd& v) {
    Eigen::VectorXcd i = Eigen::VectorXcd::Zero(v.size());
    i(1) = -v(1) * y_load;
    return i;
  };

  double prev = 2.0;
  for (const double depth : {0.9, 0.6, 0.3}) {
    SourceModel src;
    src.mode = SourceMode::kThevenin;
    src.e_th = Complex(1.02, 0.0);
    src.z_th = Complex(0.004, 0.04);
    src.sag_schedule.push_back({4.0, 6.0, depth});
    const auto v = solve_network(f, src, inj, 5.0);
    const double head = std::abs(v(0));
    CHECK(head < prev);
    prev = head;
  }
}

TEST_CASE("a converged warm start settles in a single sweep") {
  FeederModel f;
  f.nodes = {"S", "L"};
  f.source_node = "S";
  f.branches.push_back({"S", "L", Complex(0.05, 0.2)});
  SourceModel src;
  src.mode = SourceMode::kThevenin;
  src.e_th = Complex(1.0, 0.0);
  src.z_th = Complex(0.002, 0.02);
  const auto inj = [](const Eigen::VectorXcd& v) {
    Eigen::VectorXcd i = Eigen::VectorXcd::Zero(v.size());
    i(1) = -v(1) * Complex(0.9, -0.4);
    return i;
  };

  NetworkSolver solver(f, src);
  const auto v = solver.solve(inj, 0.0);
  const auto v2 = solver.solve(inj, 0.0, &v);
  CHECK(solver.last_iterations() == 1);
  CHECK((v2 - v).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("a diverging fixed point reports the last iterate") {
  FeederModel f;
  f.nodes = {"S", "L"};
  f.source_node = "S";
  f.branches.push_back({"S", "L", Complex(0.05, 0.3)});
  SourceModel src;
  src.mode = SourceMode::kStiff;
  src.e_th = Complex(1.0, 0.0);

  // Constant power far beyond the feeder's transfer capability.
  const Complex s_load(50.0, 20.0);
  const auto inj = [&](const Eigen::VectorXcd& v) {
    Eigen::VectorXcd i = Eigen::VectorXcd::Zero(v.size());
    const Complex vl = v(1);
    if (std::abs(vl) > 1e-9) i(1) = -std::conj(s_load / vl);
    return i;
  };
  SolveOptions opt;
  opt.max_iterations = 8;

  CHECK_THROWS_AS(solve_network(f, src, inj, 0.0, {}, opt), SolverError);
  try {
    solve_network(f, src, inj, 0.0, {}, opt);
  } catch (const SolverError& e) {
    CHECK(e.last_iterate.size() == 2);
    CHECK(e.mismatch > 0.0);
  }
}

TEST_CASE("every structural defect is reported by name") {
  FeederModel f;
  f.nodes = {"A", "B", "B", "Z"};
  f.source_node = "A";
  f.branches.push_back({"A", "B", Complex(-0.01, 0.1)});
  f.branches.push_back({"A", "A", Complex(0.0, 0.0)});
  f.branches.push_back({"A", "ghost", Complex(0.01, 0.1)});
  Transformer t;
  t.from = "A";
  t.to = "B";
  t.z = Complex(0.01, 0.1);
  t.tap = 0.0;
  f.transformers.push_back(t);
  CapBankInstallation cb;
  cb.node = "nowhere";
  cb.params.v_max = 1.0;
  cb.params.v_min = 1.1;
  f.cap_banks.push_back(cb);
  f.cap_banks.push_back(cb);
  f.attachments["dev1"] = "ghost";

  const auto problems = feeder_problems(f);
  CHECK(mentions(problems, "duplicate node id 'B'"));
  CHECK(mentions(problems, "negative resistance"));
  CHECK(mentions(problems, "connects node 'A' to itself"));
  CHECK(mentions(problems, "zero impedance"));
  CHECK(mentions(problems, "endpoint 'ghost'"));
  CHECK(mentions(problems, "non-positive tap"));
  CHECK(mentions(problems, "not connected to the source"));
  CHECK(mentions(problems, "cap bank node 'nowhere'"));
  CHECK(mentions(problems, "more than one cap bank at node 'nowhere'"));
  CHECK(mentions(problems, "v_max <= v_min"));
  CHECK(mentions(problems, "device 'dev1'"));
  CHECK_THROWS_AS(validate_feeder(f), std::invalid_argument);

  FeederModel unknown_src = three_node_model();
  unknown_src.source_node = "missing";
  CHECK(mentions(feeder_problems(unknown_src), "source node 'missing'"));

  CHECK(feeder_problems(three_node_model()).empty());
}

TEST_CASE("a ring topology is rejected") {
  FeederModel f;
  f.nodes = {"A", "B", "C"};
  f.source_node = "A";
  f.branches.push_back({"A", "B", Complex(0.01, 0.1)});
  f.branches.push_back({"B", "C", Complex(0.01, 0.1)});
  f.branches.push_back({"C", "A", Complex(0.01, 0.1)});
  CHECK(mentions(feeder_problems(f), "not radial"));
}
