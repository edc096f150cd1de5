#include "feedersim/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>

namespace feedersim {

namespace {

std::map<std::string, int> index_map(const FeederModel& f) {
  std::map<std::string, int> idx;
  for (std::size_t i = 0; i < f.nodes.size(); ++i)
    idx.emplace(f.nodes[i], static_cast<int>(i));
  return idx;
}

}  // namespace

std::vector<std::string> feeder_problems(const FeederModel& f) {
  std::vector<std::string> problems;
  auto complain = [&](const std::string& msg) { problems.push_back(msg); };

  if (f.nodes.empty()) {
    complain("feeder has no nodes");
    return problems;
  }
  std::set<std::string> seen;
  for (const auto& n : f.nodes)
    if (!seen.insert(n).second) complain("duplicate node id '" + n + "'");

  const auto idx = index_map(f);
  auto known = [&](const std::string& n) { return idx.count(n) != 0; };

  if (f.source_node.empty())
    complain("source node is not set");
  else if (!known(f.source_node))
    complain("source node '" + f.source_node + "' is not a feeder node");

  if (f.base_mva <= 0.0) complain("base_mva must be positive");

  // Undirected adjacency over branches and transformers for the tree check.
  std::vector<std::vector<int>> adj(f.nodes.size());
  std::size_t edge_count = 0;
  auto add_edge = [&](const std::string& a, const std::string& b,
                      const std::string& what) {
    if (!known(a)) complain(what + " endpoint '" + a + "' is not a node");
    if (!known(b)) complain(what + " endpoint '" + b + "' is not a node");
    if (a == b) complain(what + " connects node '" + a + "' to itself");
    if (known(a) && known(b) && a != b) {
      adj[idx.at(a)].push_back(idx.at(b));
      adj[idx.at(b)].push_back(idx.at(a));
      ++edge_count;
    }
  };

  for (const auto& b : f.branches) {
    add_edge(b.from, b.to, "branch " + b.from + "-" + b.to);
    if (b.z.real() < 0.0)
      complain("branch " + b.from + "-" + b.to + " has negative resistance");
    if (std::abs(b.z) == 0.0)
      complain("branch " + b.from + "-" + b.to + " has zero impedance");
  }
  for (const auto& t : f.transformers) {
    add_edge(t.from, t.to, "transformer " + t.from + "-" + t.to);
    if (t.z.real() < 0.0)
      complain("transformer " + t.from + "-" + t.to +
               " has negative resistance");
    if (std::abs(t.z) == 0.0)
      complain("transformer " + t.from + "-" + t.to + " has zero impedance");
    if (t.tap <= 0.0)
      complain("transformer " + t.from + "-" + t.to +
               " has non-positive tap");
  }

  if (edge_count != f.nodes.size() - 1)
    complain("topology is not radial: " + std::to_string(edge_count) +
             " edges for " + std::to_string(f.nodes.size()) + " nodes");
  if (known(f.source_node)) {
    std::vector<char> visited(f.nodes.size(), 0);
    std::queue<int> q;
    q.push(idx.at(f.source_node));
    visited[idx.at(f.source_node)] = 1;
    std::size_t reached = 1;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int w : adj[u])
        if (!visited[w]) {
          visited[w] = 1;
          ++reached;
          q.push(w);
        }
    }
    if (reached != f.nodes.size())
      for (std::size_t i = 0; i < f.nodes.size(); ++i)
        if (!visited[i])
          complain("node '" + f.nodes[i] + "' is not connected to the source");
  }

  std::set<std::string> bank_nodes;
  for (const auto& c : f.cap_banks) {
    if (!known(c.node))
      complain("cap bank node '" + c.node + "' is not a feeder node");
    if (!bank_nodes.insert(c.node).second)
      complain("more than one cap bank at node '" + c.node + "'");
    if (c.q_kvar < 0.0)
      complain("cap bank at '" + c.node + "' has negative rating");
    if (c.params.v_max <= c.params.v_min)
      complain("cap bank at '" + c.node + "' has v_max <= v_min");
  }
  for (const auto& [device, node] : f.attachments)
    if (!known(node))
      complain("device '" + device + "' attached to unknown node '" + node +
               "'");

  return problems;
}

void validate_feeder(const FeederModel& f) {
  const auto problems = feeder_problems(f);
  if (problems.empty()) return;
  std::ostringstream oss;
  oss << "invalid feeder model:";
  for (const auto& p : problems) oss << "\n  - " << p;
  throw std::invalid_argument(oss.str());
}

int node_index(const FeederModel& f, const std::string& id) {
  for (std::size_t i = 0; i < f.nodes.size(); ++i)
    if (f.nodes[i] == id) return static_cast<int>(i);
  throw std::out_of_range("unknown node id '" + id + "'");
}

Complex apply_sag(const SourceModel& src, double t_now) {
  for (const auto& sag : src.sag_schedule)
    if (t_now >= sag.t_start && t_now < sag.t_end)
      return Complex(sag.v_depressed, 0.0);
  return src.e_th;
}

Complex zip_power(const ZipLoad& load, double v_mag) {
  return load.s0_kva *
         (load.a_z * v_mag * v_mag + load.a_i * v_mag + load.a_p);
}

Eigen::MatrixXcd build_admittance(
    const FeederModel& f,
    const std::map<std::string, CapBankStatus>& capbank_statuses) {
  const auto idx = index_map(f);
  const auto n = static_cast<Eigen::Index>(f.nodes.size());
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);

  for (const auto& b : f.branches) {
    const Complex yb = 1.0 / b.z;
    const int i = idx.at(b.from);
    const int j = idx.at(b.to);
    y(i, i) += yb;
    y(j, j) += yb;
    y(i, j) -= yb;
    y(j, i) -= yb;
  }
  for (const auto& t : f.transformers) {
    const Complex yt = 1.0 / t.z;
    const int i = idx.at(t.from);
    const int j = idx.at(t.to);
    y(i, i) += yt / (t.tap * t.tap);
    y(j, j) += yt;
    y(i, j) -= yt / t.tap;
    y(j, i) -= yt / t.tap;
  }
  for (const auto& c : f.cap_banks) {
    auto it = capbank_statuses.find(c.node);
    const bool on =
        it == capbank_statuses.end() || it->second == CapBankStatus::kOn;
    if (!on) continue;
    const double q_pu = c.q_kvar / 1000.0 / f.base_mva;
    y(idx.at(c.node), idx.at(c.node)) += Complex(0.0, q_pu);
  }
  return y;
}

NetworkSolver::NetworkSolver(const FeederModel& f, SourceModel source,
                             SolveOptions options)
    : feeder_(f), source_(std::move(source)), options_(options) {
  validate_feeder(feeder_);
  if (source_.mode == SourceMode::kThevenin && std::abs(source_.z_th) == 0.0)
    throw std::invalid_argument(
        "thevenin source requires a nonzero source impedance");
  head_ = node_index(feeder_, feeder_.source_node);
  set_capbank_statuses({});
}

void NetworkSolver::set_capbank_statuses(
    const std::map<std::string, CapBankStatus>& statuses) {
  y_ = build_admittance(feeder_, statuses);
  refactor();
}

void NetworkSolver::refactor() {
  const auto n = y_.rows();
  if (source_.mode == SourceMode::kThevenin) {
    Eigen::MatrixXcd aug = y_;
    aug(head_, head_) += 1.0 / source_.z_th;
    lu_.compute(aug);
  } else {
    // Dirichlet head node: factor the reduced system over the other nodes.
    Eigen::MatrixXcd red(n - 1, n - 1);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == head_) continue;
      Eigen::Index c = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == head_) continue;
        red(r, c++) = y_(i, j);
      }
      ++r;
    }
    lu_.compute(red);
  }
}

Eigen::VectorXcd NetworkSolver::solve(const InjectionFn& injections,
                                      double t_now,
                                      const Eigen::VectorXcd* warm_start) {
  const auto n = y_.rows();
  const Complex v_src = apply_sag(source_, t_now);

  Eigen::VectorXcd v = warm_start && warm_start->size() == n
                           ? *warm_start
                           : Eigen::VectorXcd::Constant(n, v_src);
  if (source_.mode == SourceMode::kStiff) v(head_) = v_src;

  double delta = 0.0;
  for (int it = 1; it <= options_.max_iterations; ++it) {
    last_iterations_ = it;
    const Eigen::VectorXcd inj = injections(v);
    Eigen::VectorXcd v_new(n);
    if (source_.mode == SourceMode::kThevenin) {
      Eigen::VectorXcd rhs = inj;
      rhs(head_) += v_src / source_.z_th;
      v_new = lu_.solve(rhs);
    } else {
      Eigen::VectorXcd rhs(n - 1);
      Eigen::Index r = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (i == head_) continue;
        rhs(r++) = inj(i) - y_(i, head_) * v_src;
      }
      const Eigen::VectorXcd sol = lu_.solve(rhs);
      r = 0;
      for (Eigen::Index i = 0; i < n; ++i)
        v_new(i) = (i == head_) ? v_src : sol(r++);
    }
    delta = (v_new - v).cwiseAbs().maxCoeff();
    v = v_new;
    if (delta < options_.tolerance) return v;
  }
  std::ostringstream oss;
  oss << "network solve did not converge in " << options_.max_iterations
      << " iterations (last voltage change " << delta << " pu) at t=" << t_now;
  throw SolverError(oss.str(), v, delta);
}

Complex NetworkSolver::source_power(const Eigen::VectorXcd& v, double t_now,
                                    const Eigen::VectorXcd& injections) const {
  const Complex v_src = apply_sag(source_, t_now);
  if (source_.mode == SourceMode::kThevenin) {
    const Complex i_src = (v_src - v(head_)) / source_.z_th;
    return v(head_) * std::conj(i_src);
  }
  const Complex i_src = (y_.row(head_) * v).value() - injections(head_);
  return v(head_) * std::conj(i_src);
}

Complex NetworkSolver::network_power(const Eigen::VectorXcd& v) const {
  const Eigen::VectorXcd flows = y_ * v;
  return (v.array() * flows.array().conjugate()).sum();
}

Eigen::VectorXcd solve_network(
    const FeederModel& f, const SourceModel& src,
    const InjectionFn& device_currents, double t_now,
    const std::map<std::string, CapBankStatus>& capbank_statuses,
    SolveOptions options) {
  NetworkSolver solver(f, src, options);
  solver.set_capbank_statuses(capbank_statuses);
  return solver.solve(device_currents, t_now);
}

}  // namespace feedersim
