#pragma once

#include <array>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "reactsim/exchange.hpp"
#include "reactsim/price.hpp"
#include "reactsim/rng.hpp"
#include "reactsim/schedule.hpp"

namespace reactsim {

enum class Strategy { GVWY, SHVR, ZIC, ZIP, AA };

inline constexpr std::array<Strategy, 5> kAllStrategies{Strategy::GVWY, Strategy::SHVR, Strategy::ZIC,
                                                       Strategy::ZIP, Strategy::AA};

constexpr std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::GVWY: return "GVWY";
    case Strategy::SHVR: return "SHVR";
    case Strategy::ZIC: return "ZIC";
    case Strategy::ZIP: return "ZIP";
    case Strategy::AA: return "AA";
  }
  return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view token) {
  for (auto s : kAllStrategies)
    if (strategy_name(s) == token) return s;
  return std::nullopt;
}

constexpr bool is_stateful(Strategy s) { return s == Strategy::ZIP || s == Strategy::AA; }

/// What every strategy may know about the market besides the book.
struct MarketContext {
  PriceBounds bounds{};
  Price schedule_low{10};  ///< lowest limit on the schedule, used by SHVR's empty-book stub

  bool operator==(const MarketContext&) const = default;
};

class AccountingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Quote generation plus event response. Randomness is supplied by the
/// session, one independent stream per trader.
class Trader {
 public:
  Trader(TraderId id, Side side, MarketContext market) : id_(id), side_(side), market_(market) {}
  virtual ~Trader() = default;

  [[nodiscard]] virtual Strategy strategy() const = 0;
  [[nodiscard]] virtual std::unique_ptr<Trader> clone() const = 0;

  /// Called when the trader is selected to act while holding an assignment.
  /// No value means the trader passes this turn.
  virtual std::optional<Price> get_order(const Assignment& assignment, const LobSnapshot& book, Rng& rng) = 0;

  /// Called for every market event, with the book as it stands after the action.
  virtual void respond(const MarketEvent& event, const LobSnapshot& book, Rng& rng) {
    (void)event;
    (void)book;
    (void)rng;
  }

  [[nodiscard]] TraderId id() const { return id_; }
  [[nodiscard]] Side side() const { return side_; }
  [[nodiscard]] const MarketContext& market() const { return market_; }
  [[nodiscard]] Ticks accumulated_profit() const { return profit_; }
  void add_profit(Ticks amount) { profit_ += amount; }

  bool operator==(const Trader&) const = default;

 protected:
  Trader(const Trader&) = default;
  Trader& operator=(const Trader&) = default;

 private:
  TraderId id_;
  Side side_;
  MarketContext market_;
  Ticks profit_{0};
};

// ---- stateless quote rules ------------------------------------------------

inline Price gvwy_quote(Price limit, Side side) {
  (void)side;
  return limit;
}

/// One tick inside the best price on the trader's own side, never beyond the limit.
/// With that side of the book empty the buyer stubs at max(system min, schedule
/// low) and the seller at the system max.
inline Price shvr_quote(Price limit, Side side, const LobSnapshot& book, const MarketContext& market) {
  if (side == Side::bid) {
    const Price q = book.best_bid ? *book.best_bid + 1 : std::max(market.bounds.min, market.schedule_low);
    return std::min(q, limit);
  }
  const Price q = book.best_ask ? *book.best_ask - 1 : market.bounds.max;
  return std::max(q, limit);
}

/// Uniform integer tick on [system min, L] for buyers, [L, system max] for sellers.
inline Price zic_quote(Price limit, Side side, const PriceBounds& bounds, Rng& rng) {
  if (side == Side::bid) return Price{uniform_int<Ticks>(rng, bounds.min.ticks, std::max(bounds.min, limit).ticks)};
  return Price{uniform_int<Ticks>(rng, std::min(bounds.max, limit).ticks, bounds.max.ticks)};
}

class GvwyTrader final : public Trader {
 public:
  using Trader::Trader;
  [[nodiscard]] Strategy strategy() const override { return Strategy::GVWY; }
  [[nodiscard]] std::unique_ptr<Trader> clone() const override { return std::make_unique<GvwyTrader>(*this); }
  std::optional<Price> get_order(const Assignment& a, const LobSnapshot&, Rng&) override {
    return gvwy_quote(a.limit, a.side);
  }
  bool operator==(const GvwyTrader&) const = default;
};

class ShvrTrader final : public Trader {
 public:
  using Trader::Trader;
  [[nodiscard]] Strategy strategy() const override { return Strategy::SHVR; }
  [[nodiscard]] std::unique_ptr<Trader> clone() const override { return std::make_unique<ShvrTrader>(*this); }
  std::optional<Price> get_order(const Assignment& a, const LobSnapshot& book, Rng&) override {
    return shvr_quote(a.limit, a.side, book, market());
  }
  bool operator==(const ShvrTrader&) const = default;
};

class ZicTrader final : public Trader {
 public:
  using Trader::Trader;
  [[nodiscard]] Strategy strategy() const override { return Strategy::ZIC; }
  [[nodiscard]] std::unique_ptr<Trader> clone() const override { return std::make_unique<ZicTrader>(*this); }
  std::optional<Price> get_order(const Assignment& a, const LobSnapshot&, Rng& rng) override {
    return zic_quote(a.limit, a.side, market().bounds, rng);
  }
  bool operator==(const ZicTrader&) const = default;
};

/// Books the surplus of `trade` for `trader` against its active assignment:
/// L - price for the buyer, price - L for the seller.
inline Ticks record_profit(Trader& trader, const Trade& trade, const std::optional<Assignment>& assignment) {
  if (!assignment)
    throw AccountingError("trader " + std::to_string(trader.id()) + " traded without an active assignment");
  if (assignment->trader != trader.id())
    throw AccountingError("assignment does not belong to trader " + std::to_string(trader.id()));
  Ticks profit = 0;
  if (trade.buyer == trader.id() && assignment->side == Side::bid) {
    profit = assignment->limit - trade.price;
  } else if (trade.seller == trader.id() && assignment->side == Side::ask) {
    profit = trade.price - assignment->limit;
  } else {
    throw AccountingError("trader " + std::to_string(trader.id()) + " is not on the assigned side of this trade");
  }
  trader.add_profit(profit);
  return profit;
}

}  // namespace reactsim
