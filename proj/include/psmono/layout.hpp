#pragma once

#include <cstddef>
#include <string_view>

#include "psmono/errors.hpp"

namespace psmono {

/// Which exponent each stored slot k carries.
///
///   general  x^k
///   odd      x^(2k+1)    (sinh-type series)
///   even     x^(2k)      (cosh-type series)
///   shifted  x^(k+1)     (series without constant term, e.g. -ln(1-dx))
///
/// Two series with the same parity have the ratio A(x)/B(x) = f(x^stride) with
/// f the ratio of the slot series, so every monotonicity statement about the
/// slot sequence carries over to x.
enum class Parity { general, odd, even, shifted };

constexpr int parity_offset(Parity p) {
  return (p == Parity::odd || p == Parity::shifted) ? 1 : 0;
}

constexpr int parity_stride(Parity p) {
  return (p == Parity::odd || p == Parity::even) ? 2 : 1;
}

constexpr int slot_exponent(Parity p, std::size_t k) {
  return parity_offset(p) + parity_stride(p) * static_cast<int>(k);
}

/// Differentiation removes the constant slot when the offset is zero.
constexpr bool derivative_drops_slot(Parity p) { return parity_offset(p) == 0; }

constexpr Parity derivative_parity(Parity p) {
  switch (p) {
    case Parity::general: return Parity::general;
    case Parity::odd: return Parity::even;
    case Parity::even: return Parity::odd;
    case Parity::shifted: return Parity::general;
  }
  return Parity::general;
}

/// Number of leading slots dropped after `order` derivatives.
constexpr std::size_t derivative_slot_shift(Parity p, int order) {
  std::size_t shift = 0;
  for (int i = 0; i < order; ++i) {
    if (derivative_drops_slot(p)) ++shift;
    p = derivative_parity(p);
  }
  return shift;
}

constexpr Parity derivative_parity(Parity p, int order) {
  for (int i = 0; i < order; ++i) p = derivative_parity(p);
  return p;
}

constexpr std::string_view to_string(Parity p) {
  switch (p) {
    case Parity::general: return "general";
    case Parity::odd: return "odd";
    case Parity::even: return "even";
    case Parity::shifted: return "shifted";
  }
  return "general";
}

inline Parity parse_parity(std::string_view s) {
  if (s == "general") return Parity::general;
  if (s == "odd") return Parity::odd;
  if (s == "even") return Parity::even;
  if (s == "shifted") return Parity::shifted;
  throw parameter_error("unknown parity '" + std::string(s) + "'");
}

}  // namespace psmono
