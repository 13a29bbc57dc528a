#include "fwscale/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fwscale {
namespace {

class NetworkSimplex {
 public:
  NetworkSimplex(std::span<const double> supply, std::span<const double> demand,
                 std::span<const double> cost)
      : p_(static_cast<int>(supply.size())),
        q_(static_cast<int>(demand.size())),
        num_real_(static_cast<std::size_t>(p_) * q_),
        root_(p_ + q_),
        cost_(cost) {
    const int n = p_ + q_ + 1;
    parent_.assign(n, -1);
    pred_.assign(n, 0);
    up_.assign(n, false);
    depth_.assign(n, 0);
    pi_.assign(n, 0.0);
    flow_.assign(num_real_ + p_ + q_, 0.0);

    double max_cost = 0.0;
    for (double c : cost) max_cost = std::max(max_cost, std::fabs(c));
    art_cost_ = (max_cost + 1.0) * (p_ + q_);
    eps_ = 1e-11 * std::max(1.0, max_cost);

    const double supply_total = std::accumulate(supply.begin(), supply.end(), 0.0);
    const double demand_total = std::accumulate(demand.begin(), demand.end(), 0.0);
    const double scale = supply_total / demand_total;
    for (int i = 0; i < p_; ++i) {
      parent_[i] = root_;
      pred_[i] = num_real_ + i;
      up_[i] = true;
      depth_[i] = 1;
      pi_[i] = -art_cost_;
      flow_[num_real_ + i] = supply[i];
    }
    for (int j = 0; j < q_; ++j) {
      const int v = p_ + j;
      parent_[v] = root_;
      pred_[v] = num_real_ + v;
      up_[v] = false;
      depth_[v] = 1;
      pi_[v] = art_cost_;
      flow_[num_real_ + v] = demand[j] * scale;
    }
    block_ = std::max<std::size_t>(
        16, static_cast<std::size_t>(std::sqrt(static_cast<double>(num_real_))));
  }

  void Run() {
    while (true) {
      const std::size_t in = FindEntering();
      if (in == kNone) break;
      Pivot(in);
      ++pivots_;
    }
  }

  TransportSolution Result(std::span<const double> supply,
                           std::span<const double> demand) const {
    TransportSolution s;
    s.pivots = pivots_;
    for (std::size_t e = 0; e < num_real_; ++e) {
      if (flow_[e] > 0.0) {
        const int i = static_cast<int>(e / q_);
        const int j = static_cast<int>(e % q_);
        s.plan.push_back({i, j, flow_[e]});
        s.cost += flow_[e] * cost_[e];
      }
    }
    // Potentials relative to the first source keep magnitudes small.
    const double shift = pi_[0];
    s.source_potential.resize(p_);
    s.sink_potential.resize(q_);
    for (int i = 0; i < p_; ++i) s.source_potential[i] = pi_[i] - shift;
    for (int j = 0; j < q_; ++j) s.sink_potential[j] = pi_[p_ + j] - shift;
    const double supply_total = std::accumulate(supply.begin(), supply.end(), 0.0);
    const double demand_total = std::accumulate(demand.begin(), demand.end(), 0.0);
    for (int j = 0; j < q_; ++j) {
      s.dual_objective += demand[j] * supply_total / demand_total * s.sink_potential[j];
    }
    for (int i = 0; i < p_; ++i) s.dual_objective -= supply[i] * s.source_potential[i];
    return s;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  int Tail(std::size_t e) const {
    if (e < num_real_) return static_cast<int>(e / q_);
    const int v = static_cast<int>(e - num_real_);
    return v < p_ ? v : root_;
  }
  int Head(std::size_t e) const {
    if (e < num_real_) return p_ + static_cast<int>(e % q_);
    const int v = static_cast<int>(e - num_real_);
    return v < p_ ? root_ : v;
  }
  double Cost(std::size_t e) const {
    return e < num_real_ ? cost_[e] : art_cost_;
  }
  double Reduced(std::size_t e) const {
    return Cost(e) + pi_[Tail(e)] - pi_[Head(e)];
  }

  std::size_t FindEntering() {
    double best = -eps_;
    std::size_t best_arc = kNone;
    std::size_t scanned = 0;
    std::size_t in_block = 0;
    while (scanned < num_real_) {
      const std::size_t e = next_arc_;
      next_arc_ = next_arc_ + 1 == num_real_ ? 0 : next_arc_ + 1;
      ++scanned;
      ++in_block;
      const double rc = Reduced(e);
      if (rc < best) {
        best = rc;
        best_arc = e;
      }
      if (in_block == block_) {
        if (best_arc != kNone) return best_arc;
        in_block = 0;
      }
    }
    return best_arc;
  }

  void Pivot(std::size_t in) {
    const int first = Tail(in);
    const int second = Head(in);

    int a = first, b = second;
    while (a != b) {
      if (depth_[a] >= depth_[b]) {
        a = parent_[a];
      } else {
        b = parent_[b];
      }
    }
    const int join = a;

    double delta = std::numeric_limits<double>::infinity();
    int u_out = -1;
    int side = 0;
    for (int u = first; u != join; u = parent_[u]) {
      if (up_[u] && flow_[pred_[u]] < delta) {
        delta = flow_[pred_[u]];
        u_out = u;
        side = 1;
      }
    }
    for (int u = second; u != join; u = parent_[u]) {
      if (!up_[u] && flow_[pred_[u]] <= delta) {
        delta = flow_[pred_[u]];
        u_out = u;
        side = 2;
      }
    }
    if (u_out < 0) throw std::runtime_error("transport problem is unbounded");

    if (delta > 0.0) {
      flow_[in] += delta;
      for (int u = first; u != join; u = parent_[u]) {
        flow_[pred_[u]] += up_[u] ? -delta : delta;
      }
      for (int u = second; u != join; u = parent_[u]) {
        flow_[pred_[u]] += up_[u] ? delta : -delta;
      }
    }

    // Re-hang the detached subtree through the entering arc.
    int child = side == 1 ? first : second;
    int new_parent = side == 1 ? second : first;
    std::size_t arc = in;
    bool arc_up = side == 1;  // first -> second points from child to parent
    while (true) {
      const int old_parent = parent_[child];
      const std::size_t old_arc = pred_[child];
      const bool old_up = up_[child];
      parent_[child] = new_parent;
      pred_[child] = arc;
      up_[child] = arc_up;
      if (child == u_out) break;
      new_parent = child;
      arc = old_arc;
      arc_up = !old_up;
      child = old_parent;
    }
    Refresh();
  }

  // Recompute depths and potentials from the parent array (breadth first).
  void Refresh() {
    const int n = p_ + q_ + 1;
    head_.assign(n, -1);
    next_.assign(n, -1);
    for (int v = 0; v < n; ++v) {
      if (parent_[v] >= 0) {
        next_[v] = head_[parent_[v]];
        head_[parent_[v]] = v;
      }
    }
    order_.clear();
    order_.push_back(root_);
    depth_[root_] = 0;
    pi_[root_] = 0.0;
    for (std::size_t k = 0; k < order_.size(); ++k) {
      const int u = order_[k];
      for (int v = head_[u]; v >= 0; v = next_[v]) {
        depth_[v] = depth_[u] + 1;
        const double c = Cost(pred_[v]);
        pi_[v] = up_[v] ? pi_[u] - c : pi_[u] + c;
        order_.push_back(v);
      }
    }
  }

  int p_, q_;
  std::size_t num_real_;
  int root_;
  std::span<const double> cost_;
  double art_cost_ = 0.0;
  double eps_ = 0.0;
  std::size_t block_ = 16;
  std::size_t next_arc_ = 0;
  int pivots_ = 0;

  std::vector<int> parent_;
  std::vector<std::size_t> pred_;
  std::vector<bool> up_;
  std::vector<int> depth_;
  std::vector<double> pi_;
  std::vector<double> flow_;
  std::vector<int> head_, next_, order_;
};

}  // namespace

TransportSolution SolveTransport(std::span<const double> supply,
                                 std::span<const double> demand,
                                 std::span<const double> cost) {
  if (supply.empty() || demand.empty()) {
    throw std::invalid_argument("transport problem needs non-empty marginals");
  }
  if (cost.size() != supply.size() * demand.size()) {
    throw std::invalid_argument("cost matrix has the wrong size");
  }
  NetworkSimplex solver(supply, demand, cost);
  solver.Run();
  return solver.Result(supply, demand);
}

}  // namespace fwscale
