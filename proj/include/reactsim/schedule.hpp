#pragma once

// Symmetric supply/demand schedules, limit-price assignments, theoretical
// equilibrium and periodic replenishment.

#include <algorithm>
#include <functional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "reactsim/exchange.hpp"
#include "reactsim/price.hpp"

namespace reactsim {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ScheduleConfig {
  int n{10};  ///< traders per side
  Price price_low{10};
  Price price_high{190};
  int replenish_interval{30};
  int session_length{330};

  void validate() const {
    if (n < 1) throw ConfigError("n must be >= 1");
    if (price_low > price_high) throw ConfigError("price_low must not exceed price_high");
    if (n == 1 && price_low != price_high)
      throw ConfigError("n = 1 cannot space limits over a non-degenerate interval");
    if (replenish_interval < 1) throw ConfigError("replenish_interval must be >= 1");
    if (session_length < replenish_interval)
      throw ConfigError("session_length must be >= replenish_interval");
  }
};

/// An instruction to buy (bid side) or sell (ask side) one unit, no worse than `limit`.
struct Assignment {
  TraderId trader{0};
  Side side{Side::bid};
  Price limit{};
  Step issued_step{0};

  bool operator==(const Assignment&) const = default;
};

/// Evenly spaced limits for one side: low + i * (high - low) / (n - 1), rounded to ticks.
inline std::vector<Price> schedule_limits(const ScheduleConfig& config) {
  config.validate();
  std::vector<Price> limits;
  limits.reserve(static_cast<std::size_t>(config.n));
  const Ticks width = config.price_high - config.price_low;
  for (int i = 0; i < config.n; ++i) {
    if (config.n == 1) {
      limits.push_back(config.price_low);
      continue;
    }
    // integer rounding of low + i*width/(n-1), half away from zero
    const Ticks num = static_cast<Ticks>(i) * width;
    const Ticks den = config.n - 1;
    limits.push_back(config.price_low + (2 * num + den) / (2 * den));
  }
  return limits;
}

/// Buyers take ids 0..n-1 and sellers n..2n-1; buyer i and seller i both hold
/// the i-th limit in ascending order.
inline std::vector<Assignment> generate_symmetric_schedule(const ScheduleConfig& config) {
  const auto limits = schedule_limits(config);
  const auto n = static_cast<TraderId>(config.n);
  std::vector<Assignment> out;
  out.reserve(2 * limits.size());
  for (TraderId i = 0; i < n; ++i) out.push_back({i, Side::bid, limits[i], 0});
  for (TraderId i = 0; i < n; ++i) out.push_back({n + i, Side::ask, limits[i], 0});
  return out;
}

struct EquilibriumInfo {
  Price p0_low{};
  Price p0_high{};
  int q0{0};

  [[nodiscard]] bool empty() const { return q0 == 0; }
  [[nodiscard]] double midpoint() const { return (p0_low.currency() + p0_high.currency()) / 2.0; }
  [[nodiscard]] double half_width() const { return (p0_high.currency() - p0_low.currency()) / 2.0; }
};

/// Q0 is the largest q with the q-th highest buyer limit >= the q-th lowest
/// seller limit; P0 spans [q0-th lowest seller limit, q0-th highest buyer limit].
inline EquilibriumInfo theoretical_equilibrium(std::span<const Assignment> assignments) {
  std::vector<Price> buyers, sellers;
  for (const auto& a : assignments) (a.side == Side::bid ? buyers : sellers).push_back(a.limit);
  if (buyers.empty() || sellers.empty())
    throw ConfigError("equilibrium needs at least one buyer and one seller");
  std::sort(buyers.begin(), buyers.end(), std::greater<>());
  std::sort(sellers.begin(), sellers.end());
  int q0 = 0;
  const std::size_t depth = std::min(buyers.size(), sellers.size());
  while (static_cast<std::size_t>(q0) < depth && buyers[q0] >= sellers[q0]) ++q0;
  if (q0 == 0) return {};
  return {sellers[q0 - 1], buyers[q0 - 1], q0};
}

/// Steps 0, interval, 2*interval, ... strictly below session_length.
inline std::vector<Step> replenishment_steps(const ScheduleConfig& config) {
  config.validate();
  std::vector<Step> steps;
  for (Step s = 0; s < config.session_length; s += config.replenish_interval) steps.push_back(s);
  return steps;
}

inline void write_schedule_csv(std::ostream& out, std::span<const Assignment> assignments) {
  out << "trader_id,side,limit\n";
  for (const auto& a : assignments)
    out << a.trader << ',' << role_name(a.side) << ',' << format_price(a.limit) << '\n';
}

}  // namespace reactsim
