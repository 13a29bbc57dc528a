#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "fwscale/models.hpp"
#include "fwscale/scaling.hpp"

namespace fwscale {

// Key-value experiment description. One `key = value` per line, `#` starts
// a comment. Recognized keys:
//
//   model                 random_walk | coalescing_flow | custom
//   measure               JSON measure file for model=custom (relative to
//                         the config file)
//   cells                 cell count per unit time for model=custom
//   levels                a..b (converge); level = n (spectrum)
//   psi, psi.clamp, psi.x0
//   sites, boundary       coalescing flow
//   budget.exact_states, budget.mc_samples, budget.transport_pairs
//   mode                  auto | exact | mc
//   seed, threads
//   t_grid                comma separated points in [0,1]
//   e_family              sets separated by ';', each a '+'-joined list of
//                         dyadic intervals a:b, e.g. 0:0.25+0.75:1
//   m_discretization      quantile atoms of a continuous limit
//   cond41                on | off
//   cond41.t              dyadic time for the condition table
struct ExperimentConfig {
  std::string model;
  std::string measure_path;
  int cells = 0;
  ModelOptions options;
  std::optional<int> level;
  ScalingConfig scaling;
  // Every key as written, after validation, for manifests.
  std::map<std::string, std::string> resolved;
};

// Throws ConfigError listing every problem found. `base_dir` resolves the
// relative measure path. Unknown model names raise UnknownModel.
ExperimentConfig ParseConfig(const std::string& text, const std::string& base_dir = ".");

ModelSpec BuildModel(const ExperimentConfig& config);

// Parses "0:0.25+0.75:1" into a ClosedSet at the smallest resolution 2^k
// that represents every endpoint.
ClosedSet ParseDyadicSet(const std::string& text);

}  // namespace fwscale
