#include "fwscale/dyadic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fwscale/errors.hpp"

namespace fwscale {

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  - " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

namespace {

using Wide = __int128;

// Both operands scaled to the larger denominator.
std::pair<Wide, Wide> Aligned(const Dyadic& a, const Dyadic& b, int* den) {
  *den = std::max(a.log2den(), b.log2den());
  Wide x = static_cast<Wide>(a.num()) << (*den - a.log2den());
  Wide y = static_cast<Wide>(b.num()) << (*den - b.log2den());
  return {x, y};
}

Dyadic FromWide(Wide num, int den) {
  while (den > 0 && (num & 1) == 0) {
    num /= 2;
    --den;
  }
  if (num > std::numeric_limits<std::int64_t>::max() ||
      num < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error("dyadic numerator overflow");
  }
  return Dyadic(static_cast<std::int64_t>(num), den);
}

}  // namespace

Dyadic::Dyadic(std::int64_t num, int log2den) : num_(num), log2den_(log2den) {
  if (log2den < 0) {
    throw std::invalid_argument("dyadic denominator exponent must be >= 0");
  }
  if (num_ == 0) {
    log2den_ = 0;
    return;
  }
  while (log2den_ > 0 && (num_ & 1) == 0) {
    num_ /= 2;
    --log2den_;
  }
  if (log2den_ > kMaxLog2Den) {
    throw std::invalid_argument("dyadic denominator exponent too large");
  }
}

Dyadic Dyadic::FromDouble(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite dyadic");
  for (int k = 0; k <= kMaxLog2Den; ++k) {
    const double scaled = std::ldexp(x, k);
    if (scaled == std::trunc(scaled) && std::fabs(scaled) < 9.0e18) {
      return Dyadic(static_cast<std::int64_t>(scaled), k);
    }
  }
  throw std::invalid_argument("value is not a representable dyadic rational");
}

double Dyadic::ToDouble() const {
  return std::ldexp(static_cast<double>(num_), -log2den_);
}

std::string Dyadic::ToString() const {
  if (log2den_ == 0) return std::to_string(num_);
  return std::to_string(num_) + "/2^" + std::to_string(log2den_);
}

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  int den;
  auto [x, y] = Aligned(a, b, &den);
  return FromWide(x + y, den);
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) {
  int den;
  auto [x, y] = Aligned(a, b, &den);
  return FromWide(x - y, den);
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  int den;
  auto [x, y] = Aligned(a, b, &den);
  if (x < y) return std::strong_ordering::less;
  if (x > y) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace fwscale
