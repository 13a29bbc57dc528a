#include "fwscale/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include "fwscale/errors.hpp"

namespace fwscale {
namespace {

struct ClampedMoments {
  double second;  // E[min(Z^2, C^2)]
  double fourth;  // E[min(Z^2, C^2)^2]
  double inner;   // E[Z^2; |Z| <= C]
};

ClampedMoments NormalClampedMoments(double c) {
  const boost::math::normal_distribution<double> z;
  const double mass = 2.0 * boost::math::cdf(z, c) - 1.0;
  const double dens = boost::math::pdf(z, c);
  const double tail = 1.0 - mass;
  const double z2 = mass - 2.0 * c * dens;
  const double z4 = 3.0 * mass - 2.0 * dens * (c * c * c + 3.0 * c);
  return {z2 + c * c * tail, z4 + c * c * c * c * tail, z2};
}

}  // namespace

AtomicMeasure RandomWalkStep(int n) {
  if (n < 0) throw std::invalid_argument("level must be >= 0");
  const double h = std::pow(2.0, -0.5 * n);
  return AtomicMeasure::Create(UndergroupKind::kReal,
                               {{RealElement{-h}, 0.5}, {RealElement{h}, 0.5}});
}

Functional MakeFunctional(UndergroupKind kind, const std::string& name,
                          const ModelOptions& options) {
  const double c = options.psi_clamp;
  if (name == "constant") {
    return Functional::PointEvaluation("constant", 0.0, [](double) { return 1.0; }, 1.0);
  }
  if (kind == UndergroupKind::kStepMap) {
    if (name == "threshold") {
      return Functional::PointEvaluation(
          "threshold", options.psi_x0, [](double y) { return y > 0.5 ? 1.0 : -1.0; }, 1.0);
    }
    throw std::invalid_argument("unknown step-map functional: " + name);
  }
  if (name == "endpoint") {
    return Functional::PointEvaluation("endpoint", 0.0, [](double x) { return x; });
  }
  if (name == "endpoint_clamped") {
    if (c <= 0.0) throw std::invalid_argument("endpoint_clamped needs psi.clamp > 0");
    const double norm = std::sqrt(NormalClampedMoments(c).inner);
    return Functional::PointEvaluation(
        "endpoint_clamped", 0.0,
        [c, norm](double x) { return std::fabs(x) <= c ? x / norm : 0.0; }, c / norm);
  }
  if (name == "second_chaos") {
    if (c <= 0.0) {
      return Functional::PointEvaluation(
          "second_chaos", 0.0, [](double x) { return (x * x - 1.0) / std::numbers::sqrt2; });
    }
    const ClampedMoments m = NormalClampedMoments(c);
    const double mean = m.second;
    const double sd = std::sqrt(m.fourth - m.second * m.second);
    return Functional::PointEvaluation(
        "second_chaos", 0.0,
        [c, mean, sd](double x) { return (std::min(x * x, c * c) - mean) / sd; },
        std::max(mean, c * c - mean) / sd);
  }
  if (name == "sign") {
    return Functional::PointEvaluation(
        "sign", 0.0, [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }, 1.0);
  }
  throw std::invalid_argument("unknown real-line functional: " + name);
}

CoalescingLevel BuildCoalescingLevel(int n, int sites, const std::string& boundary) {
  if (n < 1) throw std::invalid_argument("coalescing flow needs level >= 1");
  if (boundary != "reflect") {
    throw std::invalid_argument("unsupported boundary rule: " + boundary);
  }
  CoalescingLevel level;
  const int k = (n + 1) / 2;
  const int lattice = 1 << k;
  level.lattice_log2 = k;
  level.sites = sites <= 0 ? std::min(lattice, 8) : std::min(sites, lattice);
  if (level.sites > 16) throw std::invalid_argument("at most 16 sites are supported");
  const int m = level.sites;
  const int j0 = (lattice - m) / 2;

  // Meeting points are multiples of 2^-k, so the nominal domain boundaries
  // (j0+i+1) 2^-k would collide with them; move each a quarter step,
  // alternating direction, onto odd multiples of 2^-(k+2).
  level.perturbed = m >= 2;
  for (int i = 0; i + 1 < m; ++i) {
    const std::int64_t quarter = 4 * static_cast<std::int64_t>(j0 + i + 1) + (i % 2 == 0 ? 1 : -1);
    level.boundaries.push_back(Dyadic(quarter, k + 2));
  }

  std::vector<Atom> atoms;
  const unsigned patterns = 1u << m;
  for (unsigned p = 0; p < patterns; ++p) {
    atoms.push_back({CoalescingMap(level, p), 1.0 / patterns});
  }
  level.measure = AtomicMeasure::Create(UndergroupKind::kStepMap, std::move(atoms), true);
  return level;
}

StepMap CoalescingMap(const CoalescingLevel& level, unsigned pattern) {
  const int m = level.sites;
  const int k = level.lattice_log2;
  const int j0 = ((1 << k) - m) / 2;
  // Positions in half lattice steps relative to the first site.
  std::vector<int> h(m);
  for (int i = 0; i < m; ++i) {
    const bool up = pattern >> i & 1;
    const bool prev_up = i > 0 && (pattern >> (i - 1) & 1);
    const bool next_down = i + 1 < m && !(pattern >> (i + 1) & 1);
    if (up) {
      h[i] = next_down ? 2 * i + 1 : 2 * i + 2;
    } else {
      h[i] = prev_up ? 2 * i - 1 : 2 * i - 2;
    }
    h[i] = std::clamp(h[i], 0, 2 * (m - 1));
  }
  std::vector<Dyadic> values;
  for (int i = 0; i < m; ++i) values.push_back(Dyadic(2 * j0 + h[i] + 1, k + 1));
  return StepMap::Create(level.boundaries, std::move(values));
}

ModelSpec BuiltinModel(const std::string& name, const ModelOptions& options) {
  ModelSpec spec;
  spec.name = name;
  spec.level_lo = options.level_lo;
  spec.level_hi = options.level_hi;
  if (name == "random_walk") {
    spec.kind = UndergroupKind::kReal;
    spec.level_measure = RandomWalkStep;
    spec.limit = SemigroupHandle::Brownian(options.m_discretization);
    spec.psi = MakeFunctional(spec.kind, options.psi.empty() ? "endpoint_clamped" : options.psi,
                              options);
    spec.psi_note = "function of the endpoint, continuous off a null set";
    spec.parameters["step"] = "+-2^(-n/2), equiprobable";
    spec.parameters["limit"] = "Brownian, m = " + std::to_string(options.m_discretization);
    spec.parameters["psi.clamp"] = fmt::format("{}", options.psi_clamp);
    return spec;
  }
  if (name == "coalescing_flow") {
    spec.kind = UndergroupKind::kStepMap;
    const int sites = options.sites;
    const std::string boundary = options.boundary;
    // Validate once up front so configuration errors surface early.
    BuildCoalescingLevel(std::max(1, options.level_lo), sites, boundary);
    spec.level_measure = [sites, boundary](int n) {
      return BuildCoalescingLevel(n, sites, boundary).measure;
    };
    spec.psi = MakeFunctional(spec.kind, options.psi.empty() ? "threshold" : options.psi,
                              options);
    spec.psi_note = "sign of f(x0) - 1/2, continuous off a null set";
    spec.parameters["sites"] = sites <= 0 ? "min(2^ceil(n/2), 8)" : std::to_string(sites);
    spec.parameters["boundary"] = boundary;
    spec.parameters["psi.x0"] = fmt::format("{}", options.psi_x0);
    spec.parameters["domain_boundaries"] = "lattice midpoints shifted by +-1/4 step";
    return spec;
  }
  throw UnknownModel(name);
}

}  // namespace fwscale
