#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace reactsim {

/// Profit and surplus are accounted in whole ticks so that conservation
/// checks are exact.
using Ticks = std::int64_t;

inline constexpr Ticks kTicksPerUnit = 100;

/// A price on the tick grid. One tick is 0.01 currency units.
struct Price {
  Ticks ticks{0};

  constexpr auto operator<=>(const Price&) const = default;

  [[nodiscard]] constexpr double currency() const {
    return static_cast<double>(ticks) / static_cast<double>(kTicksPerUnit);
  }
};

constexpr Price operator+(Price p, Ticks d) { return Price{p.ticks + d}; }
constexpr Price operator-(Price p, Ticks d) { return Price{p.ticks - d}; }
constexpr Ticks operator-(Price a, Price b) { return a.ticks - b.ticks; }

/// Nearest tick to a currency amount (0.97 -> 97 ticks).
inline Price price_from_currency(double value) {
  return Price{static_cast<Ticks>(std::llround(value * static_cast<double>(kTicksPerUnit)))};
}

/// Renders a tick count as currency with two decimals ("-0.05", "1.90").
inline std::string format_ticks(Ticks ticks) {
  const bool negative = ticks < 0;
  const Ticks mag = negative ? -ticks : ticks;
  std::string cents = std::to_string(mag % kTicksPerUnit);
  if (cents.size() < 2) cents.insert(0, "0");
  return (negative ? "-" : "") + std::to_string(mag / kTicksPerUnit) + "." + cents;
}

inline std::string format_price(Price p) { return format_ticks(p.ticks); }

/// Parses "0.97", "1", "-0.05" into ticks; at most two decimals are accepted.
inline Ticks parse_ticks(const std::string& text) {
  std::size_t pos = 0;
  const double value = std::stod(text, &pos);
  if (pos != text.size()) throw std::invalid_argument("not a currency amount: '" + text + "'");
  const double scaled = value * static_cast<double>(kTicksPerUnit);
  const double rounded = std::round(scaled);
  if (std::abs(scaled - rounded) > 1e-6)
    throw std::invalid_argument("amount finer than one tick: '" + text + "'");
  return static_cast<Ticks>(rounded);
}

enum class Side { bid, ask };

constexpr Side opposite(Side s) { return s == Side::bid ? Side::ask : Side::bid; }
constexpr const char* side_name(Side s) { return s == Side::bid ? "bid" : "ask"; }
constexpr const char* role_name(Side s) { return s == Side::bid ? "buy" : "sell"; }

/// System price domain. Every quote must lie in [min, max].
struct PriceBounds {
  Price min{1};
  Price max{200};

  [[nodiscard]] constexpr bool contains(Price p) const { return p >= min && p <= max; }
  [[nodiscard]] constexpr Price clamp(Price p) const {
    return p < min ? min : (p > max ? max : p);
  }

  bool operator==(const PriceBounds&) const = default;
};

/// Converts a fractional tick value to the grid. Ties round toward the
/// quoting side's conservative direction: down for bids, up for asks.
inline Price round_quote(double ticks, Side side) {
  const double fl = std::floor(ticks);
  const double frac = ticks - fl;
  constexpr double eps = 1e-9;
  Ticks out;
  if (frac < 0.5 - eps) {
    out = static_cast<Ticks>(fl);
  } else if (frac > 0.5 + eps) {
    out = static_cast<Ticks>(fl) + 1;
  } else {
    out = side == Side::bid ? static_cast<Ticks>(fl) : static_cast<Ticks>(fl) + 1;
  }
  return Price{out};
}

/// Enforces the no-loss rule (bid <= limit, ask >= limit) and the system bounds.
inline Price clamp_no_loss(Price quote, Price limit, Side side, const PriceBounds& bounds) {
  Price q = bounds.clamp(quote);
  if (side == Side::bid && q > limit) q = limit;
  if (side == Side::ask && q < limit) q = limit;
  return q;
}

}  // namespace reactsim
