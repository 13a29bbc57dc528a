#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "fwscale/dyadic.hpp"
#include "fwscale/undergroup.hpp"

namespace fwscale {

inline constexpr std::size_t kDefaultTransportPairs = 1'000'000;

struct Atom {
  Element element;
  double weight;
};

// Finitely supported probability measure on one undergroup. Atoms are kept
// sorted by ElementLess with equal elements merged, so two measures with the
// same mass distribution compare equal atom for atom.
class AtomicMeasure {
 public:
  // Merges equal atoms and checks weights (> 0, total 1 within 1e-12).
  // With `renormalize` the total is rescaled to 1 instead of checked.
  static AtomicMeasure Create(UndergroupKind kind, std::vector<Atom> atoms,
                              bool renormalize = false);
  static AtomicMeasure Dirac(Element e);

  UndergroupKind kind() const { return kind_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  // Total weight on atoms ApproxEqual to `e`.
  double MassAt(const Element& e) const;

 private:
  AtomicMeasure(UndergroupKind kind, std::vector<Atom> atoms)
      : kind_(kind), atoms_(std::move(atoms)) {}

  UndergroupKind kind_ = UndergroupKind::kReal;
  std::vector<Atom> atoms_;
};

// Sorts and merges without touching the weights.
std::vector<Atom> MergeAtoms(std::vector<Atom> atoms);

// Image of mu x nu under composition; std::nullopt when any positive-weight
// pair fails to compose. Throws MixedUndergroup.
std::optional<AtomicMeasure> Convolve(const AtomicMeasure& mu,
                                      const AtomicMeasure& nu);

// mu * ... * mu (k factors), merging after each step. Atoms lighter than
// `w_min` are pruned after each step and the rest renormalized; the total
// pruned mass is added to *pruned_mass when given. A nonzero `max_atoms`
// raises BudgetExceeded as soon as a partial power grows past it.
std::optional<AtomicMeasure> ConvolutionPower(const AtomicMeasure& mu, int k,
                                              double w_min = 0.0,
                                              double* pruned_mass = nullptr,
                                              std::size_t max_atoms = 0);

// Minimal transport cost under the capped metric. Throws BudgetExceeded when
// |supp mu| * |supp nu| > max_pairs.
double KrDistance(const AtomicMeasure& mu, const AtomicMeasure& nu,
                  std::size_t max_pairs = kDefaultTransportPairs);

struct DualCheckResult {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

// Solves the Lipschitz-potential LP on the joint support independently of
// the transport solver and compares optima. Joint support at most 12 points.
DualCheckResult KrDualCheck(const AtomicMeasure& mu, const AtomicMeasure& nu);

// The family (mu_t) either as powers of one base measure at pitch
// 2^-pitch_log2, or as a sampler returning an m-atom discretization.
class SemigroupHandle {
 public:
  using Sampler = std::function<AtomicMeasure(double t, int m)>;

  static SemigroupHandle Discrete(AtomicMeasure base, int pitch_log2);
  static SemigroupHandle Continuous(UndergroupKind kind, Sampler sampler, int m);
  // Brownian motion on the line: m equal atoms at the N(0,t) quantiles of
  // probabilities (2i+1)/(2m).
  static SemigroupHandle Brownian(int m = 512);

  bool is_discrete() const { return !sampler_; }
  UndergroupKind kind() const { return kind_; }
  int pitch_log2() const { return pitch_log2_; }
  int discretization() const { return m_; }
  const AtomicMeasure& base() const { return *base_; }

  // `max_atoms` bounds convolution powers (0: unbounded).
  AtomicMeasure MuT(const Dyadic& t, std::size_t max_atoms = 0) const;

 private:
  SemigroupHandle() = default;

  UndergroupKind kind_ = UndergroupKind::kReal;
  std::optional<AtomicMeasure> base_;
  int pitch_log2_ = 0;
  Sampler sampler_;
  int m_ = 0;
};

AtomicMeasure MuT(const SemigroupHandle& handle, const Dyadic& t);

AtomicMeasure BrownianQuantiles(double t, int m);

struct Condition41Row {
  int n = 0;
  double t = 0.0;
  double kr = 0.0;
  // Discretization size of the reference measure; 0 for discrete references.
  int m = 0;
  // True when the reference is the next level rather than a limit.
  bool cauchy = false;
};

struct Condition41Table {
  std::vector<Condition41Row> rows;
  bool monotone = true;
  // First level whose measure outgrew the pair budget; rows stop before it.
  std::optional<int> truncated_at;
};

inline constexpr double kCondition41Slack = 1e-3;

// rho_KR(mu^(n)_t, mu_t) for each n. Without a limit handle, each level is
// compared with the next one in `n_range` instead (the last row is dropped).
// When a level's measure outgrows the pair budget the table ends there;
// BudgetExceeded is thrown only if no row could be computed.
Condition41Table CheckCondition41(
    const std::function<SemigroupHandle(int)>& level,
    const SemigroupHandle* limit, const Dyadic& t, const std::vector<int>& n_range,
    std::size_t max_pairs = kDefaultTransportPairs);

// Same handle at every level.
Condition41Table CheckCondition41(const SemigroupHandle& disc,
                                  const SemigroupHandle& cont, const Dyadic& t,
                                  const std::vector<int>& n_range,
                                  std::size_t max_pairs = kDefaultTransportPairs);

}  // namespace fwscale
