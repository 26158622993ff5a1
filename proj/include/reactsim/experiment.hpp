#pragma once

// Replicated sessions, per-group profit statistics and the sensitivity sweep.

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "reactsim/session.hpp"
#include "reactsim/stats.hpp"

namespace reactsim {

/// A named set of traders whose mean profit per trader is compared.
struct GroupDef {
  std::string name;
  std::vector<TraderId> members;
};

struct GroupStats {
  std::string name;
  std::size_t traders{0};
  std::vector<double> samples;  ///< mean profit per trader per session, currency
  double mean{0.0};
  double ci_half{0.0};
};

struct Comparison {
  std::string group_a;
  std::string group_b;
  TTestResult test{};
};

struct SessionRecord {
  std::size_t repetition{0};
  std::uint64_t seed{0};
  std::vector<Ticks> group_totals;  ///< total profit per group, same order as the groups
};

struct ExperimentConfig {
  std::string condition{"default"};
  SessionConfig session{};
  std::vector<GroupDef> groups;  ///< defaults to one group per strategy
  std::vector<std::pair<std::string, std::string>> comparisons;
  std::uint64_t master_seed{1};
  std::size_t repetitions{100};
  unsigned workers{0};  ///< 0: hardware concurrency
  /// Odd repetitions run the mix in reverse order, so each strategy holds
  /// each schedule position equally often. Needs strategy groups.
  bool counterbalance{false};
};

struct ExperimentSummary {
  std::string condition;
  std::size_t repetitions{0};
  std::vector<GroupStats> groups;
  std::vector<Comparison> comparisons;
  std::vector<SessionRecord> sessions;

  [[nodiscard]] const GroupStats& group(const std::string& name) const {
    for (const auto& g : groups)
      if (g.name == name) return g;
    throw std::out_of_range("no group named " + name);
  }

  [[nodiscard]] const Comparison& comparison(const std::string& a, const std::string& b) const {
    for (const auto& c : comparisons)
      if (c.group_a == a && c.group_b == b) return c;
    throw std::out_of_range("no comparison " + a + " vs " + b);
  }
};

// ---- group builders --------------------------------------------------------

inline std::vector<GroupDef> strategy_groups(std::span<const TraderInfo> layout) {
  std::vector<GroupDef> out;
  for (auto s : kAllStrategies) {
    GroupDef g{std::string(strategy_name(s)), {}};
    for (const auto& t : layout)
      if (t.strategy == s) g.members.push_back(t.id);
    if (!g.members.empty()) out.push_back(std::move(g));
  }
  return out;
}

/// Traders of one side at one position, named e.g. "buyer_0".
inline GroupDef position_group(std::span<const TraderInfo> layout, Side side, int position) {
  GroupDef g{std::string(side == Side::bid ? "buyer_" : "seller_") + std::to_string(position), {}};
  for (const auto& t : layout)
    if (t.side == side && t.position == position) g.members.push_back(t.id);
  return g;
}

/// Both sides at one position, named e.g. "position_9".
inline GroupDef position_pair_group(std::span<const TraderInfo> layout, int position) {
  GroupDef g{"position_" + std::to_string(position), {}};
  for (const auto& t : layout)
    if (t.position == position) g.members.push_back(t.id);
  return g;
}

/// Ranks for a fast half and a slow half on each side: positions below n/2
/// are fast. Buyer and seller at position p get ranks 2p+1 and 2p+2, the
/// lower one alternating between sides.
inline std::vector<int> half_split_ranks(std::span<const TraderInfo> layout) {
  std::vector<int> ranks(layout.size(), 0);
  for (const auto& t : layout) {
    const bool buyer_first = t.position % 2 == 0;
    const bool lower = (t.side == Side::bid) == buyer_first;
    ranks[t.id] = 2 * t.position + (lower ? 1 : 2);
  }
  return ranks;
}

/// Groups "fast_buyers", "slow_buyers", "fast_sellers", "slow_sellers",
/// "buyers", "sellers" for a half-split population of n per side.
inline std::vector<GroupDef> half_split_groups(std::span<const TraderInfo> layout, int n) {
  std::vector<GroupDef> out{{"fast_buyers", {}}, {"slow_buyers", {}}, {"fast_sellers", {}},
                            {"slow_sellers", {}}, {"buyers", {}},      {"sellers", {}}};
  for (const auto& t : layout) {
    const bool fast = t.position < n / 2;
    const std::size_t idx = (t.side == Side::bid ? 0 : 2) + (fast ? 0 : 1);
    out[idx].members.push_back(t.id);
    out[t.side == Side::bid ? 4 : 5].members.push_back(t.id);
  }
  return out;
}

/// Expands per-strategy reaction times to a per-trader table.
inline ReactionTimeTable reaction_times_by_strategy(std::span<const TraderInfo> layout,
                                                    const std::map<Strategy, double>& times) {
  ReactionTimeTable table;
  table.times.resize(layout.size());
  for (const auto& t : layout) {
    auto it = times.find(t.strategy);
    if (it == times.end())
      throw ConfigError("no reaction time for strategy " + std::string(strategy_name(t.strategy)));
    table.times[t.id] = it->second;
  }
  return table;
}

// ---- experiment -------------------------------------------------------------

inline std::uint64_t repetition_seed(std::uint64_t master, std::size_t repetition) {
  return derive_seed(master, repetition);
}

/// Session config with the mix reversed. Per-trader ranks and reaction
/// times follow their trader: the k-th trader of a strategy on a side keeps
/// its value.
inline SessionConfig reversed_mix(const SessionConfig& base) {
  SessionConfig out = base;
  std::reverse(out.mix.begin(), out.mix.end());
  const auto from = layout_traders(base.mix);
  const auto to = layout_traders(out.mix);
  std::vector<TraderId> source(to.size());
  for (const auto& t : to) {
    int k = 0;
    for (const auto& u : to)
      if (u.id < t.id && u.side == t.side && u.strategy == t.strategy) ++k;
    for (const auto& u : from)
      if (u.side == t.side && u.strategy == t.strategy && k-- == 0) {
        source[t.id] = u.id;
        break;
      }
  }
  auto remap = [&](auto& table) {
    if (table.empty()) return;
    auto copy = table;
    for (std::size_t i = 0; i < table.size(); ++i) table[i] = copy[source[i]];
  };
  remap(out.selection.ranks);
  remap(out.selection.reaction_times.times);
  return out;
}

inline ExperimentSummary run_experiment(const ExperimentConfig& config) {
  if (config.repetitions < 2) throw ConfigError("an experiment needs at least two repetitions");
  config.session.validate();
  if (config.counterbalance && !config.groups.empty())
    throw ConfigError("counterbalanced experiments compare strategy groups only");
  const SessionConfig reversed = config.counterbalance ? reversed_mix(config.session) : config.session;
  const auto layout = layout_traders(config.session.mix);
  const auto layout_rev = layout_traders(reversed.mix);
  const auto groups = config.groups.empty() ? strategy_groups(layout) : config.groups;
  const auto groups_rev = config.groups.empty() ? strategy_groups(layout_rev) : config.groups;
  for (const auto& g : groups)
    if (g.members.empty()) throw ConfigError("group " + g.name + " has no members");

  ExperimentSummary summary;
  summary.condition = config.condition;
  summary.repetitions = config.repetitions;
  summary.sessions.resize(config.repetitions);

  auto run_one = [&](std::size_t rep) {
    const bool flip = config.counterbalance && rep % 2 == 1;
    SessionConfig sc = flip ? reversed : config.session;
    sc.seed = repetition_seed(config.master_seed, rep);
    sc.limit_rotation = config.counterbalance ? rep / 2 : rep;
    const SessionResult r = run_session(sc);
    SessionRecord rec{rep, sc.seed, {}};
    for (const auto& g : flip ? groups_rev : groups) {
      Ticks total = 0;
      for (TraderId id : g.members) total += r.traders[id].profit;
      rec.group_totals.push_back(total);
    }
    summary.sessions[rep] = std::move(rec);
  };

  unsigned workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, config.repetitions));
  if (workers <= 1) {
    for (std::size_t rep = 0; rep < config.repetitions; ++rep) run_one(rep);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t rep = w; rep < config.repetitions; rep += workers) run_one(rep);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    GroupStats gs;
    gs.name = groups[gi].name;
    gs.traders = groups[gi].members.size();
    for (const auto& rec : summary.sessions)
      gs.samples.push_back(static_cast<double>(rec.group_totals[gi]) /
                           (static_cast<double>(gs.traders) * static_cast<double>(kTicksPerUnit)));
    const auto ci = confidence_interval_95(gs.samples);
    gs.mean = ci.mean;
    gs.ci_half = ci.half_width;
    summary.groups.push_back(std::move(gs));
  }
  for (const auto& [a, b] : config.comparisons)
    summary.comparisons.push_back({a, b, two_sample_t_test(summary.group(a).samples, summary.group(b).samples)});
  return summary;
}

/// Balanced two-strategy market: n/2 of each on both sides.
inline std::vector<MixEntry> balanced_mix(Strategy a, Strategy b, int n) {
  if (n % 2 != 0) throw ConfigError("a balanced test needs an even number of traders per side");
  return {{a, n / 2}, {b, n / 2}};
}

// ---- sensitivity sweep ------------------------------------------------------

struct SweepPoint {
  double relative_time{1.0};
  double mean_aa{0.0};
  double mean_other{0.0};
  double ci_aa{0.0};
  double ci_other{0.0};
  double p{1.0};
};

struct SweepResult {
  Strategy other{Strategy::SHVR};
  std::vector<SweepPoint> points;
  std::optional<double> inversion;  ///< first R at which AA's mean falls below the competitor's
};

/// Balanced AA:other markets under proportional selection with AA's
/// reaction time R units and the competitor's 1 unit.
inline SweepResult sensitivity_sweep(const SessionConfig& base, Strategy other, std::span<const double> relative_times,
                                     std::size_t repetitions, std::uint64_t master_seed, unsigned workers = 0,
                                     bool counterbalance = true) {
  if (other == Strategy::AA) throw ConfigError("the competitor must differ from AA");
  SweepResult out;
  out.other = other;
  for (double r : relative_times) {
    if (r < 1.0 || r > 40.0) throw ConfigError("relative reaction times must lie in [1, 40]");
    ExperimentConfig ec;
    ec.session = base;
    ec.session.mix = balanced_mix(Strategy::AA, other, base.schedule.n);
    const auto layout = layout_traders(ec.session.mix);
    ec.session.selection.kind = SelectionKind::speed_proportional;
    ec.session.selection.reaction_times = reaction_times_by_strategy(layout, {{Strategy::AA, r}, {other, 1.0}});
    ec.condition = "AA:" + std::string(strategy_name(other)) + "@R=" + std::to_string(r);
    ec.comparisons = {{"AA", std::string(strategy_name(other))}};
    ec.master_seed = master_seed;
    ec.repetitions = repetitions;
    ec.workers = workers;
    ec.counterbalance = counterbalance;
    const auto s = run_experiment(ec);
    const auto& aa = s.group("AA");
    const auto& ot = s.group(std::string(strategy_name(other)));
    out.points.push_back({r, aa.mean, ot.mean, aa.ci_half, ot.ci_half, s.comparisons.front().test.p});
    if (!out.inversion && aa.mean < ot.mean) out.inversion = r;
  }
  return out;
}

}  // namespace reactsim
