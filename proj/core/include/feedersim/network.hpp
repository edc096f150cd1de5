#pragma once

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "feedersim/protection.hpp"
#include "feedersim/types.hpp"

namespace feedersim {

struct Branch {
  std::string from;
  std::string to;
  Complex z;  // series impedance, pu on base_mva
};

// Two-winding transformer as a series element with an off-nominal tap on the
// `from` (primary) side.
struct Transformer {
  std::string from;
  std::string to;
  Complex z;  // leakage impedance, pu
  double tap = 1.0;
};

struct CapBankInstallation {
  std::string node;
  double q_kvar = 0.0;  // generated at 1.0 pu voltage
  CapBankParams params;
};

struct FeederModel {
  std::vector<std::string> nodes;
  std::vector<Branch> branches;
  std::vector<Transformer> transformers;
  std::vector<CapBankInstallation> cap_banks;
  std::map<std::string, std::string> attachments;  // device id -> node id
  double base_mva = kSystemBaseMva;
  std::map<std::string, double> base_kv;  // optional, per node
  std::string source_node;
};

// All structural problems with the model (unknown endpoints, non-tree
// topology, negative resistance, ...). Empty means valid.
std::vector<std::string> feeder_problems(const FeederModel& f);

// Throws std::invalid_argument listing every problem found.
void validate_feeder(const FeederModel& f);

// Index of a node id in f.nodes; throws std::out_of_range when absent.
int node_index(const FeederModel& f, const std::string& id);

enum class SourceMode { kStiff, kThevenin };

struct SagInterval {
  double t_start = 0.0;  // inclusive
  double t_end = 0.0;    // exclusive
  double v_depressed = 0.35;  // pu
};

struct SourceModel {
  SourceMode mode = SourceMode::kThevenin;
  Complex e_th{1.0, 0.0};  // open-circuit voltage, pu
  Complex z_th{0.0, 0.0};  // source impedance; zero only in stiff mode
  std::vector<SagInterval> sag_schedule;
};

// Effective source voltage at t_now: the scheduled depressed value inside an
// active [t_start, t_end) interval, e_th otherwise.
Complex apply_sag(const SourceModel& src, double t_now);

struct ZipLoad {
  Complex s0_kva{0.0, 0.0};  // drawn at 1.0 pu voltage
  double a_z = 0.4;
  double a_i = 0.3;
  double a_p = 0.3;
};

// S = S0 * (a_z*v^2 + a_i*v + a_p).
Complex zip_power(const ZipLoad& load, double v_mag);

// Nodal admittance matrix over f.nodes (in order): series branches,
// transformers with their tap stamps, and the shunt of every capacitor bank
// whose status is on. Statuses are keyed by bank node; a missing key means
// on.
Eigen::MatrixXcd build_admittance(
    const FeederModel& f,
    const std::map<std::string, CapBankStatus>& capbank_statuses);

struct SolveOptions {
  double tolerance = 1e-6;  // max |dV| between sweeps, pu
  int max_iterations = 50;
};

// Thrown when the fixed-point iteration fails to settle; carries the last
// iterate and its voltage-change norm for diagnosis.
class SolverError : public std::runtime_error {
 public:
  SolverError(std::string what, Eigen::VectorXcd last, double mismatch_norm)
      : std::runtime_error(std::move(what)),
        last_iterate(std::move(last)),
        mismatch(mismatch_norm) {}

  Eigen::VectorXcd last_iterate;
  double mismatch;
};

// Per-node injected currents (negative of drawn), system-base pu, evaluated
// at the supplied node voltages.
using InjectionFn = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

// Quasi-static nodal solver. Holds the LU factorization of the (source
// augmented) admittance matrix and refactors only when the matrix changes,
// so capacitor-bank switching is the only per-run refactor trigger.
class NetworkSolver {
 public:
  NetworkSolver(const FeederModel& f, SourceModel source,
                SolveOptions options = {});

  // Re-stamps the admittance matrix for the given capbank statuses.
  void set_capbank_statuses(
      const std::map<std::string, CapBankStatus>& statuses);

  // Fixed-point solve of Y*V = I_inj(V) + source boundary at time t_now.
  // warm_start seeds the iteration (previous-step voltages).
  Eigen::VectorXcd solve(const InjectionFn& injections, double t_now,
                         const Eigen::VectorXcd* warm_start = nullptr);

  int last_iterations() const { return last_iterations_; }

  // Complex power delivered by the source into the head node for a solved
  // voltage profile.
  Complex source_power(const Eigen::VectorXcd& v, double t_now,
                       const Eigen::VectorXcd& injections) const;

  // Total complex power absorbed by everything stamped in Y (series losses
  // plus shunt elements) for a voltage profile.
  Complex network_power(const Eigen::VectorXcd& v) const;

  const Eigen::MatrixXcd& admittance() const { return y_; }
  int head_index() const { return head_; }

 private:
  void refactor();

  FeederModel feeder_;
  SourceModel source_;
  SolveOptions options_;
  Eigen::MatrixXcd y_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
  int head_ = 0;
  int last_iterations_ = 0;
};

// One-shot convenience wrapper around NetworkSolver.
Eigen::VectorXcd solve_network(const FeederModel& f, const SourceModel& src,
                               const InjectionFn& device_currents,
                               double t_now,
                               const std::map<std::string, CapBankStatus>&
                                   capbank_statuses = {},
                               SolveOptions options = {});

}  // namespace feedersim
