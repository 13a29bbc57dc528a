#pragma once

#include <optional>
#include <vector>

namespace fwscale {

// max c^T y  s.t.  A y <= b, y >= 0, with b >= 0 (the origin is feasible).
// Dense tableau simplex with Bland's rule; meant for tiny problems only.
// Returns std::nullopt when the problem is unbounded.
std::optional<double> MaximizeLp(const std::vector<std::vector<double>>& a,
                                 const std::vector<double>& b,
                                 const std::vector<double>& c);

}  // namespace fwscale
