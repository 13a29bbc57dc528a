#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "fwscale/undergroup.hpp"

namespace fwscale {

// A bounded functional psi: G -> R, evaluated along a composition word
// X_{0,1} X_{1,2} ... through a state that is advanced one factor at a time
// (a right action of the undergroup).
//
// Two shapes are supported. Element functionals carry the composed element
// itself as state. Point evaluations carry only the image f(x0) of a fixed
// point, which keeps the number of reachable states small; on the real line
// the element x acts as the translation y -> y + x.
class Functional {
 public:
  using ElementFn = std::function<double(const Element&)>;
  using ScalarFn = std::function<double(double)>;

  static Functional OfElement(std::string name, ElementFn psi,
                              double bound = std::numeric_limits<double>::infinity());
  // psi(f) = g(f(x0)).
  static Functional PointEvaluation(std::string name, double x0, ScalarFn g,
                                    double bound = std::numeric_limits<double>::infinity());

  const std::string& name() const { return name_; }
  double bound() const { return bound_; }
  bool is_point_evaluation() const { return static_cast<bool>(scalar_); }
  double x0() const { return x0_; }

  // State of the empty word.
  Element Initial(UndergroupKind kind) const;
  // State after appending `increment`; std::nullopt when the composition is
  // undefined along the tracked state.
  std::optional<Element> Advance(const Element& state, const Element& increment) const;
  double Value(const Element& state) const;

  double operator()(const Element& f) const;

 private:
  std::string name_;
  double bound_ = std::numeric_limits<double>::infinity();
  ElementFn element_;
  ScalarFn scalar_;
  double x0_ = 0.0;
};

}  // namespace fwscale
