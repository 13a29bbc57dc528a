#include "fwscale/functional.hpp"

#include <stdexcept>

namespace fwscale {

Functional Functional::OfElement(std::string name, ElementFn psi, double bound) {
  if (!psi) throw std::invalid_argument("functional needs a callable");
  Functional f;
  f.name_ = std::move(name);
  f.element_ = std::move(psi);
  f.bound_ = bound;
  return f;
}

Functional Functional::PointEvaluation(std::string name, double x0, ScalarFn g,
                                       double bound) {
  if (!g) throw std::invalid_argument("functional needs a callable");
  Functional f;
  f.name_ = std::move(name);
  f.scalar_ = std::move(g);
  f.x0_ = x0;
  f.bound_ = bound;
  return f;
}

Element Functional::Initial(UndergroupKind kind) const {
  if (scalar_) return RealElement{x0_};
  return UnitOf(kind);
}

std::optional<Element> Functional::Advance(const Element& state,
                                           const Element& increment) const {
  if (!scalar_) return Compose(state, increment);
  const double y = std::get<RealElement>(state).x;
  if (const auto* r = std::get_if<RealElement>(&increment)) {
    return RealElement{y + r->x};
  }
  auto next = std::get<StepMap>(increment).Evaluate(y);
  if (!next) return std::nullopt;
  return RealElement{*next};
}

double Functional::Value(const Element& state) const {
  if (scalar_) return scalar_(std::get<RealElement>(state).x);
  return element_(state);
}

double Functional::operator()(const Element& f) const {
  if (!scalar_) return element_(f);
  if (const auto* r = std::get_if<RealElement>(&f)) return scalar_(x0_ + r->x);
  auto y = std::get<StepMap>(f).Evaluate(x0_);
  if (!y) throw std::domain_error("point evaluation at a jump of the step map");
  return scalar_(*y);
}

}  // namespace fwscale
