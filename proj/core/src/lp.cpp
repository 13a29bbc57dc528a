#include "fwscale/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fwscale {

std::optional<double> MaximizeLp(const std::vector<std::vector<double>>& a,
                                 const std::vector<double>& b,
                                 const std::vector<double>& c) {
  const std::size_t m = a.size();
  const std::size_t n = c.size();
  if (b.size() != m) throw std::invalid_argument("lp: row count mismatch");
  constexpr double kEps = 1e-13;

  // Columns 0..n-1 structural, n..n+m-1 slack, last is the right-hand side.
  const std::size_t width = n + m + 1;
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(width, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i].size() != n) throw std::invalid_argument("lp: column count mismatch");
    if (b[i] < 0.0) throw std::invalid_argument("lp: negative right-hand side");
    for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1.0;
    t[i][width - 1] = b[i];
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];

  while (true) {
    std::size_t enter = width;
    for (std::size_t j = 0; j + 1 < width; ++j) {
      if (t[m][j] < -kEps) {
        enter = j;
        break;
      }
    }
    if (enter == width) break;

    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] > kEps) {
        const double ratio = t[i][width - 1] / t[i][enter];
        if (ratio < best - kEps ||
            (leave != m && std::fabs(ratio - best) <= kEps &&
             basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave == m) return std::nullopt;

    const double pivot = t[leave][enter];
    for (double& v : t[leave]) v /= pivot;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double factor = t[i][enter];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) t[i][j] -= factor * t[leave][j];
    }
    basis[leave] = enter;
  }
  return t[m][width - 1];
}

}  // namespace fwscale
