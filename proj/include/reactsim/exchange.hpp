#pragma once

// Single-exchange limit order book with continuous double auction matching.
// Every order is for one unit and each trader holds at most one resting
// order; a new submission replaces the trader's previous one.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "reactsim/price.hpp"

namespace reactsim {

using TraderId = std::uint32_t;
using Step = std::int64_t;

struct Order {
  TraderId trader{0};
  Side side{Side::bid};
  Price price{};
  int quantity{1};
  Step step{0};

  bool operator==(const Order&) const = default;
};

struct Trade {
  TraderId buyer{0};
  TraderId seller{0};
  Price price{};
  Step step{0};
  /// Side of the incoming order that crossed the spread.
  Side aggressor{Side::bid};

  bool operator==(const Trade&) const = default;
};

struct Level {
  Price price{};
  int volume{0};

  bool operator==(const Level&) const = default;
};

struct LobSnapshot {
  std::vector<Level> bids;  // price descending
  std::vector<Level> asks;  // price ascending
  std::optional<Price> best_bid;
  std::optional<Price> best_ask;
  std::optional<Trade> last_trade;

  [[nodiscard]] int best_bid_volume() const { return bids.empty() ? 0 : bids.front().volume; }
  [[nodiscard]] int best_ask_volume() const { return asks.empty() ? 0 : asks.front().volume; }

  bool operator==(const LobSnapshot&) const = default;
};

enum class EventKind { order_posted, order_cancelled, trade };

struct MarketEvent {
  EventKind kind{EventKind::order_posted};
  std::variant<Order, Trade> payload;

  [[nodiscard]] const Order* order() const { return std::get_if<Order>(&payload); }
  [[nodiscard]] const Trade* trade() const { return std::get_if<Trade>(&payload); }

  bool operator==(const MarketEvent&) const = default;
};

class OrderRejected : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnknownTrader : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class OrderBook {
 public:
  OrderBook(std::size_t trader_count, PriceBounds bounds)
      : bounds_(bounds), resting_(trader_count) {}

  /// Cancels the trader's resting order (if any), then either executes
  /// against the best opposing level at the resting price or rests.
  std::vector<MarketEvent> submit(const Order& order) {
    check_trader(order.trader);
    if (order.quantity != 1)
      throw OrderRejected("order quantity must be 1, got " + std::to_string(order.quantity));
    if (!bounds_.contains(order.price))
      throw OrderRejected("price " + format_price(order.price) + " outside [" +
                          format_price(bounds_.min) + ", " + format_price(bounds_.max) + "]");

    std::vector<MarketEvent> events;
    if (auto cancelled = cancel(order.trader)) events.push_back(*cancelled);

    if (order.side == Side::bid) {
      if (!asks_.empty() && order.price >= asks_.begin()->first) {
        events.push_back(execute(order, asks_));
        return events;
      }
      insert(order, bids_);
    } else {
      if (!bids_.empty() && order.price <= bids_.begin()->first) {
        events.push_back(execute(order, bids_));
        return events;
      }
      insert(order, asks_);
    }
    events.push_back(MarketEvent{EventKind::order_posted, order});
    return events;
  }

  std::optional<MarketEvent> cancel(TraderId trader) {
    check_trader(trader);
    auto& slot = resting_[trader];
    if (!slot) return std::nullopt;
    Order order = *slot;
    if (order.side == Side::bid) {
      erase(order, bids_);
    } else {
      erase(order, asks_);
    }
    slot.reset();
    return MarketEvent{EventKind::order_cancelled, order};
  }

  [[nodiscard]] LobSnapshot snapshot() const {
    LobSnapshot snap;
    snap.bids.reserve(bids_.size());
    for (const auto& [price, queue] : bids_) snap.bids.push_back({price, static_cast<int>(queue.size())});
    snap.asks.reserve(asks_.size());
    for (const auto& [price, queue] : asks_) snap.asks.push_back({price, static_cast<int>(queue.size())});
    if (!snap.bids.empty()) snap.best_bid = snap.bids.front().price;
    if (!snap.asks.empty()) snap.best_ask = snap.asks.front().price;
    snap.last_trade = last_trade_;
    return snap;
  }

  [[nodiscard]] std::optional<Order> resting_order(TraderId trader) const {
    check_trader(trader);
    return resting_[trader];
  }

  [[nodiscard]] std::size_t resting_count() const {
    std::size_t n = 0;
    for (const auto& o : resting_) n += o.has_value();
    return n;
  }

  [[nodiscard]] std::size_t trader_count() const { return resting_.size(); }
  [[nodiscard]] const PriceBounds& bounds() const { return bounds_; }

 private:
  template <class Compare>
  using Side_ = std::map<Price, std::deque<Order>, Compare>;

  void check_trader(TraderId trader) const {
    if (trader >= resting_.size())
      throw UnknownTrader("unknown trader id " + std::to_string(trader));
  }

  template <class Compare>
  void insert(const Order& order, Side_<Compare>& book) {
    book[order.price].push_back(order);
    resting_[order.trader] = order;
  }

  template <class Compare>
  static void erase(const Order& order, Side_<Compare>& book) {
    auto level = book.find(order.price);
    auto& queue = level->second;
    for (auto it = queue.begin(); it != queue.end(); ++it) {
      if (it->trader == order.trader) {
        queue.erase(it);
        break;
      }
    }
    if (queue.empty()) book.erase(level);
  }

  // Matches against the time-priority head of the best opposing level.
  template <class Compare>
  MarketEvent execute(const Order& aggressor, Side_<Compare>& opposing) {
    auto level = opposing.begin();
    const Order passive = level->second.front();
    level->second.pop_front();
    if (level->second.empty()) opposing.erase(level);
    resting_[passive.trader].reset();

    Trade trade;
    trade.buyer = aggressor.side == Side::bid ? aggressor.trader : passive.trader;
    trade.seller = aggressor.side == Side::ask ? aggressor.trader : passive.trader;
    trade.price = passive.price;
    trade.step = aggressor.step;
    trade.aggressor = aggressor.side;
    last_trade_ = trade;
    return MarketEvent{EventKind::trade, trade};
  }

  PriceBounds bounds_;
  Side_<std::greater<>> bids_;
  Side_<std::less<>> asks_;
  std::vector<std::optional<Order>> resting_;
  std::optional<Trade> last_trade_;
};

/// Spread, midprice and microprice in currency units.
struct LobMetrics {
  double spread{0};
  double midprice{0};
  double microprice{0};
};

/// Returns nothing when either side of the book is empty. The microprice
/// weights each best price by the volume resting on its own side:
/// (V_bid * BB + V_ask * BA) / (V_bid + V_ask).
inline std::optional<LobMetrics> lob_metrics(const LobSnapshot& book) {
  if (!book.best_bid || !book.best_ask) return std::nullopt;
  const double bb = book.best_bid->currency();
  const double ba = book.best_ask->currency();
  const double vb = book.best_bid_volume();
  const double va = book.best_ask_volume();
  LobMetrics m;
  m.spread = static_cast<double>(*book.best_ask - *book.best_bid) / static_cast<double>(kTicksPerUnit);
  m.midprice = static_cast<double>(book.best_bid->ticks + book.best_ask->ticks) / (2.0 * kTicksPerUnit);
  m.microprice = (vb * bb + va * ba) / (vb + va);
  return m;
}

inline void write_trade_tape_csv(std::ostream& out, std::span<const Trade> trades) {
  out << "step,buyer_id,seller_id,price\n";
  for (const auto& t : trades)
    out << t.step << ',' << t.buyer << ',' << t.seller << ',' << format_price(t.price) << '\n';
}

}  // namespace reactsim
