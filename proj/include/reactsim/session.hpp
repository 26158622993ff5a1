#pragma once

// One market session: periodic replenishment, selection-driven actions,
// matching, event broadcast and profit accounting.

#include <algorithm>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "reactsim/agents/factory.hpp"
#include "reactsim/exchange.hpp"
#include "reactsim/rng.hpp"
#include "reactsim/schedule.hpp"
#include "reactsim/scheduler.hpp"

namespace reactsim {

/// How schedule limits map to trader positions. `indexed`: position i holds
/// the i-th limit. `shuffled`: a per-session random permutation, fixed for
/// the whole session. `rotated`: buyers shift by k mod n and sellers by
/// (k / n) mod n for rotation index k, so n*n consecutive sessions give every
/// position every limit equally often on both sides.
enum class LimitMapping { indexed, shuffled, rotated };

struct MixEntry {
  Strategy strategy{Strategy::ZIC};
  int count{0};  ///< traders of this strategy on each side

  bool operator==(const MixEntry&) const = default;
};

struct TraderInfo {
  TraderId id{0};
  Side side{Side::bid};
  Strategy strategy{Strategy::ZIC};
  int position{0};  ///< index within its side

  bool operator==(const TraderInfo&) const = default;
};

/// Buyers take ids 0..n-1 and sellers n..2n-1. Strategies are interleaved
/// round-robin along each side so that mixed populations share the schedule
/// evenly.
inline std::vector<TraderInfo> layout_traders(std::span<const MixEntry> mix) {
  std::vector<Strategy> order;
  std::vector<int> left;
  for (const auto& m : mix) left.push_back(m.count);
  bool any = true;
  while (any) {
    any = false;
    for (std::size_t k = 0; k < mix.size(); ++k) {
      if (left[k] > 0) {
        order.push_back(mix[k].strategy);
        --left[k];
        any = true;
      }
    }
  }
  const auto n = static_cast<TraderId>(order.size());
  std::vector<TraderInfo> out;
  for (TraderId i = 0; i < n; ++i) out.push_back({i, Side::bid, order[i], static_cast<int>(i)});
  for (TraderId i = 0; i < n; ++i) out.push_back({n + i, Side::ask, order[i], static_cast<int>(i)});
  return out;
}

struct SessionConfig {
  ScheduleConfig schedule{};
  std::vector<MixEntry> mix{{Strategy::ZIC, 10}};
  SelectionConfig selection{};
  LimitMapping limits{LimitMapping::indexed};
  PriceBounds bounds{};
  AgentParams agents{};
  std::uint64_t seed{1};
  std::size_t limit_rotation{0};  ///< rotation index k, rotated mapping only
  bool record_quotes{false};

  void validate() const {
    schedule.validate();
    if (mix.empty()) throw ConfigError("trader mix is empty");
    int total = 0;
    std::set<Strategy> seen;
    for (const auto& m : mix) {
      if (m.count < 0) throw ConfigError("negative trader count for " + std::string(strategy_name(m.strategy)));
      if (!seen.insert(m.strategy).second)
        throw ConfigError("strategy listed twice in mix: " + std::string(strategy_name(m.strategy)));
      total += m.count;
    }
    if (total != schedule.n)
      throw ConfigError("trader mix has " + std::to_string(total) + " traders per side but n = " +
                        std::to_string(schedule.n));
    if (bounds.min.ticks < 1 || bounds.min > bounds.max) throw ConfigError("invalid system price bounds");
    if (schedule.price_low < bounds.min || schedule.price_high > bounds.max)
      throw ConfigError("schedule interval lies outside the system price bounds");
  }
};

struct TraderOutcome {
  TraderInfo info{};
  Price limit{};
  Ticks profit{0};
  int trades{0};

  bool operator==(const TraderOutcome&) const = default;
};

struct QuoteRecord {
  Step step{0};
  TraderId trader{0};
  Side side{Side::bid};
  Price price{};

  bool operator==(const QuoteRecord&) const = default;
};

struct SessionResult {
  std::uint64_t seed{0};
  std::vector<TraderOutcome> traders;  ///< indexed by trader id
  std::vector<Trade> trades;
  std::vector<QuoteRecord> quotes;

  [[nodiscard]] Ticks total_profit() const {
    Ticks t = 0;
    for (const auto& o : traders) t += o.profit;
    return t;
  }

  /// Sum over trades of (buyer limit - seller limit).
  [[nodiscard]] Ticks trade_surplus() const {
    Ticks s = 0;
    for (const auto& t : trades) s += traders[t.buyer].limit - traders[t.seller].limit;
    return s;
  }

  [[nodiscard]] Ticks strategy_total(Strategy s) const {
    Ticks t = 0;
    for (const auto& o : traders)
      if (o.info.strategy == s) t += o.profit;
    return t;
  }

  [[nodiscard]] int strategy_count(Strategy s) const {
    return static_cast<int>(std::count_if(traders.begin(), traders.end(),
                                          [s](const TraderOutcome& o) { return o.info.strategy == s; }));
  }

  /// Mean profit per trader of the strategy, currency units.
  [[nodiscard]] double strategy_mean(Strategy s) const {
    const int n = strategy_count(s);
    return n == 0 ? 0.0 : static_cast<double>(strategy_total(s)) / (n * static_cast<double>(kTicksPerUnit));
  }

  bool operator==(const SessionResult&) const = default;
};

/// Wraps each trader after construction; used by the profiler to time calls.
using TraderDecorator = std::function<std::unique_ptr<Trader>(std::unique_ptr<Trader>)>;

/// Independent random streams of one session.
struct SessionStreams {
  static constexpr std::uint64_t scheduler = 0;
  static constexpr std::uint64_t limits = 1;
  static constexpr std::uint64_t trader_init = 1000;
  static constexpr std::uint64_t trader_run = 100000;
};

/// Limit held by each trader id for the session.
inline std::vector<Price> session_limits(const SessionConfig& config, std::span<const TraderInfo> layout) {
  const auto ladder = schedule_limits(config.schedule);
  const auto n = ladder.size();
  std::vector<std::size_t> buyer_perm(n), seller_perm(n);
  std::iota(buyer_perm.begin(), buyer_perm.end(), 0);
  std::iota(seller_perm.begin(), seller_perm.end(), 0);
  if (config.limits == LimitMapping::shuffled) {
    Rng rng(derive_seed(config.seed, SessionStreams::limits));
    std::shuffle(buyer_perm.begin(), buyer_perm.end(), rng);
    std::shuffle(seller_perm.begin(), seller_perm.end(), rng);
  } else if (config.limits == LimitMapping::rotated && n > 0) {
    const std::size_t kb = config.limit_rotation % n;
    const std::size_t ks = (config.limit_rotation / n) % n;
    for (std::size_t i = 0; i < n; ++i) {
      buyer_perm[i] = (i + kb) % n;
      seller_perm[i] = (i + ks) % n;
    }
  }
  std::vector<Price> out(layout.size());
  for (const auto& t : layout) {
    const auto pos = static_cast<std::size_t>(t.position);
    out[t.id] = ladder[t.side == Side::bid ? buyer_perm[pos] : seller_perm[pos]];
  }
  return out;
}

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline SessionResult run_session(const SessionConfig& config, const TraderDecorator& decorate = {}) {
  config.validate();
  const auto layout = layout_traders(config.mix);
  const auto limits = session_limits(config, layout);
  const MarketContext market{config.bounds, config.schedule.price_low};

  std::vector<std::unique_ptr<Trader>> traders;
  std::vector<Rng> run_rngs;
  std::vector<TraderId> buyers, sellers;
  traders.reserve(layout.size());
  for (const auto& t : layout) {
    Rng init(derive_seed(config.seed, SessionStreams::trader_init + t.id));
    auto trader = make_trader(t.strategy, t.id, t.side, market, config.agents, init);
    traders.push_back(decorate ? decorate(std::move(trader)) : std::move(trader));
    run_rngs.emplace_back(derive_seed(config.seed, SessionStreams::trader_run + t.id));
    (t.side == Side::bid ? buyers : sellers).push_back(t.id);
  }

  Rng sched_rng(derive_seed(config.seed, SessionStreams::scheduler));
  const Scheduler scheduler(config.selection, buyers, sellers, sched_rng);

  SessionResult result;
  result.seed = config.seed;
  for (const auto& t : layout) result.traders.push_back({t, limits[t.id], 0, 0});

  OrderBook book(layout.size(), config.bounds);
  std::vector<std::optional<Assignment>> active(layout.size());
  LobSnapshot snap = book.snapshot();

  const auto replenish = replenishment_steps(config.schedule);
  std::size_t next_replenish = 0;

  for (Step step = 0; step < config.schedule.session_length; ++step) {
    if (next_replenish < replenish.size() && replenish[next_replenish] == step) {
      ++next_replenish;
      for (const auto& t : layout) {
        book.cancel(t.id);
        active[t.id] = Assignment{t.id, t.side, limits[t.id], step};
      }
      snap = book.snapshot();
    }

    for (TraderId tid : scheduler.next(static_cast<std::size_t>(step), sched_rng)) {
      if (!active[tid]) continue;  // filled this period: pass
      const Assignment assignment = *active[tid];
      auto quote = traders[tid]->get_order(assignment, snap, run_rngs[tid]);
      if (!quote) continue;
      if ((assignment.side == Side::bid && *quote > assignment.limit) ||
          (assignment.side == Side::ask && *quote < assignment.limit))
        throw InvariantViolation("trader " + std::to_string(tid) + " quoted beyond its limit");
      if (config.record_quotes) result.quotes.push_back({step, tid, assignment.side, *quote});

      const auto events = book.submit(Order{tid, assignment.side, *quote, 1, step});
      for (const auto& ev : events) {
        if (const Trade* trade = ev.trade()) {
          for (TraderId party : {trade->buyer, trade->seller}) {
            result.traders[party].profit += record_profit(*traders[party], *trade, active[party]);
            ++result.traders[party].trades;
            active[party].reset();
          }
          result.trades.push_back(*trade);
        }
      }
      snap = book.snapshot();
      if (snap.best_bid && snap.best_ask && !(*snap.best_bid < *snap.best_ask))
        throw InvariantViolation("order book rests crossed");
      for (const auto& ev : events)
        for (auto& trader : traders) trader->respond(ev, snap, run_rngs[trader->id()]);
    }
  }
  return result;
}

inline void write_quote_tape_csv(std::ostream& out, std::span<const QuoteRecord> quotes) {
  out << "step,trader_id,side,price\n";
  for (const auto& q : quotes)
    out << q.step << ',' << q.trader << ',' << side_name(q.side) << ',' << format_price(q.price) << '\n';
}

}  // namespace reactsim
