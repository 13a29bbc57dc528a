#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace fwscale {

// Exact binary fraction num / 2^log2den, always stored in lowest terms
// (num odd unless log2den == 0).
class Dyadic {
 public:
  static constexpr int kMaxLog2Den = 62;

  constexpr Dyadic() = default;
  Dyadic(std::int64_t num, int log2den);

  static Dyadic FromInt(std::int64_t v) { return Dyadic(v, 0); }
  // Exact conversion; throws std::invalid_argument when `x` is not a dyadic
  // rational representable within kMaxLog2Den.
  static Dyadic FromDouble(double x);

  std::int64_t num() const { return num_; }
  int log2den() const { return log2den_; }
  double ToDouble() const;
  std::string ToString() const;

  Dyadic Half() const { return Dyadic(num_, log2den_ + 1); }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a) { return Dyadic(-a.num_, a.log2den_); }

  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);
  friend bool operator==(const Dyadic& a, const Dyadic& b) = default;

 private:
  std::int64_t num_ = 0;
  int log2den_ = 0;
};

}  // namespace fwscale
