#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fwscale {

struct TransportPlanEntry {
  int source;
  int sink;
  double mass;
};

struct TransportSolution {
  double cost = 0.0;
  // Σ b_j v_j − Σ a_i u_i for the final potentials; equals `cost` at optimum.
  double dual_objective = 0.0;
  std::vector<double> source_potential;
  std::vector<double> sink_potential;
  std::vector<TransportPlanEntry> plan;
  int pivots = 0;
};

// Exact balanced transportation problem
//   min Σ c_ij π_ij  s.t.  Σ_j π_ij = a_i,  Σ_i π_ij = b_j,  π >= 0
// solved with a primal network simplex (block pricing, strongly feasible
// spanning trees). `cost` is row-major p x q. Demands are rescaled to the
// supply total before solving.
TransportSolution SolveTransport(std::span<const double> supply,
                                 std::span<const double> demand,
                                 std::span<const double> cost);

}  // namespace fwscale
