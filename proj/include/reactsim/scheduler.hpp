#pragma once

// Selection models deciding who acts, and in which order, each time step.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "reactsim/exchange.hpp"
#include "reactsim/rng.hpp"
#include "reactsim/schedule.hpp"

namespace reactsim {

enum class SelectionKind { random_order, fixed_order, tournament_rank, speed_proportional };

constexpr std::string_view selection_token(SelectionKind k) {
  switch (k) {
    case SelectionKind::random_order: return "random";
    case SelectionKind::fixed_order: return "fixed";
    case SelectionKind::tournament_rank: return "rank";
    case SelectionKind::speed_proportional: return "proportional";
  }
  return "?";
}

inline std::optional<SelectionKind> parse_selection(std::string_view token) {
  for (auto k : {SelectionKind::random_order, SelectionKind::fixed_order, SelectionKind::tournament_rank,
                 SelectionKind::speed_proportional})
    if (selection_token(k) == token) return k;
  return std::nullopt;
}

/// Uniform random permutation: every trader acts exactly once.
inline std::vector<TraderId> random_step(std::span<const TraderId> traders, Rng& rng) {
  std::vector<TraderId> seq(traders.begin(), traders.end());
  std::shuffle(seq.begin(), seq.end(), rng);
  return seq;
}

/// Order A interleaves sellers first (s1, b1, s2, b2, ...); order B buyers first.
enum class FixedOrdering { sellers_first, buyers_first };

inline std::vector<TraderId> fixed_order_step(std::span<const TraderId> buyers, std::span<const TraderId> sellers,
                                              std::size_t step_index, FixedOrdering initial) {
  if (buyers.size() != sellers.size())
    throw ConfigError("fixed order selection needs equal numbers of buyers and sellers");
  const bool flip = step_index % 2 == 1;
  const bool sellers_first = (initial == FixedOrdering::sellers_first) != flip;
  std::vector<TraderId> seq;
  seq.reserve(2 * buyers.size());
  for (std::size_t i = 0; i < buyers.size(); ++i) {
    seq.push_back(sellers_first ? sellers[i] : buyers[i]);
    seq.push_back(sellers_first ? buyers[i] : sellers[i]);
  }
  return seq;
}

/// Tournament ranking. Two draws from the pool (independent, so the same
/// trader may be drawn twice); the lower rank acts and leaves. On equal rank
/// the second draw acts. `rank_of` is indexed by trader id; lower is faster.
inline std::vector<TraderId> tournament_step(std::span<const TraderId> traders, std::span<const int> rank_of,
                                             Rng& rng) {
  std::vector<TraderId> pool(traders.begin(), traders.end());
  std::vector<TraderId> seq;
  seq.reserve(pool.size());
  while (pool.size() > 1) {
    const auto ia = uniform_int<std::size_t>(rng, 0, pool.size() - 1);
    const auto ib = uniform_int<std::size_t>(rng, 0, pool.size() - 1);
    const std::size_t winner = rank_of[pool[ib]] > rank_of[pool[ia]] ? ia : ib;
    seq.push_back(pool[winner]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(winner));
  }
  if (!pool.empty()) seq.push_back(pool.front());
  return seq;
}

/// Per-trader reaction times (any consistent unit), indexed by trader id.
struct ReactionTimeTable {
  std::vector<double> times;

  void validate() const {
    if (times.empty()) throw ConfigError("reaction time table is empty");
    for (std::size_t i = 0; i < times.size(); ++i)
      if (!(times[i] > 0.0) || !std::isfinite(times[i]))
        throw ConfigError("reaction time of trader " + std::to_string(i) + " must be positive");
  }
};

/// Expected references per step: R_max / R_i, so the slowest trader gets 1.
inline std::vector<double> proportional_weights(const ReactionTimeTable& table) {
  table.validate();
  const double slowest = *std::max_element(table.times.begin(), table.times.end());
  std::vector<double> w;
  w.reserve(table.times.size());
  for (double t : table.times) w.push_back(slowest / t);
  return w;
}

/// Biased pool for one step: floor(w) references plus one more with
/// probability frac(w). Integer weights give a deterministic pool.
inline std::vector<TraderId> proportional_pool(std::span<const TraderId> traders, std::span<const double> weights,
                                               Rng& rng) {
  std::vector<TraderId> pool;
  for (TraderId id : traders) {
    const double w = weights[id];
    const double whole = std::floor(w + 1e-12);
    const double frac = w - whole;
    auto count = static_cast<std::size_t>(whole);
    if (frac > 1e-12 && uniform01(rng) < frac) ++count;
    pool.insert(pool.end(), count, id);
  }
  return pool;
}

inline std::vector<TraderId> proportional_pool(const ReactionTimeTable& table, Rng& rng) {
  std::vector<TraderId> ids(table.times.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<TraderId>(i);
  const auto w = proportional_weights(table);
  return proportional_pool(ids, w, rng);
}

/// Draws pool references without replacement until the pool is empty.
inline std::vector<TraderId> proportional_step(std::vector<TraderId> pool, Rng& rng) {
  std::shuffle(pool.begin(), pool.end(), rng);
  return pool;
}

struct SelectionConfig {
  SelectionKind kind{SelectionKind::random_order};
  std::vector<int> ranks;           ///< by trader id, tournament only
  ReactionTimeTable reaction_times;  ///< by trader id, proportional only
};

/// Session-owned step generator for one of the four selection models.
class Scheduler {
 public:
  Scheduler(SelectionConfig config, std::vector<TraderId> buyers, std::vector<TraderId> sellers, Rng& rng)
      : config_(std::move(config)), buyers_(std::move(buyers)), sellers_(std::move(sellers)) {
    all_ = buyers_;
    all_.insert(all_.end(), sellers_.begin(), sellers_.end());
    std::sort(all_.begin(), all_.end());
    switch (config_.kind) {
      case SelectionKind::fixed_order:
        if (buyers_.size() != sellers_.size())
          throw ConfigError("fixed order selection needs equal numbers of buyers and sellers");
        initial_ = uniform01(rng) < 0.5 ? FixedOrdering::sellers_first : FixedOrdering::buyers_first;
        break;
      case SelectionKind::tournament_rank:
        if (config_.ranks.size() != all_.size()) throw ConfigError("tournament ranking needs a rank for every trader");
        break;
      case SelectionKind::speed_proportional:
        if (config_.reaction_times.times.size() != all_.size())
          throw ConfigError("proportional selection needs a reaction time for every trader");
        weights_ = proportional_weights(config_.reaction_times);
        break;
      case SelectionKind::random_order: break;
    }
  }

  std::vector<TraderId> next(std::size_t step_index, Rng& rng) const {
    switch (config_.kind) {
      case SelectionKind::random_order: return random_step(all_, rng);
      case SelectionKind::fixed_order: return fixed_order_step(buyers_, sellers_, step_index, initial_);
      case SelectionKind::tournament_rank: return tournament_step(all_, config_.ranks, rng);
      case SelectionKind::speed_proportional: return proportional_step(proportional_pool(all_, weights_, rng), rng);
    }
    return {};
  }

  [[nodiscard]] const SelectionConfig& config() const { return config_; }
  [[nodiscard]] FixedOrdering initial_ordering() const { return initial_; }

 private:
  SelectionConfig config_;
  std::vector<TraderId> buyers_;
  std::vector<TraderId> sellers_;
  std::vector<TraderId> all_;
  std::vector<double> weights_;
  FixedOrdering initial_{FixedOrdering::sellers_first};
};

}  // namespace reactsim
