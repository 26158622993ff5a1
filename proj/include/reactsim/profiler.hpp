#pragma once

// Wall-clock profiling of get_order and respond per strategy, and the
// reaction-time tables derived from it.

#include <chrono>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "reactsim/experiment.hpp"
#include "reactsim/session.hpp"

namespace reactsim {

using ProfileClock = std::chrono::steady_clock;

/// Published per-action times in microseconds (GVWY, SHVR, ZIC, ZIP, AA).
inline std::map<Strategy, double> table2_times() {
  return {{Strategy::GVWY, 4.2}, {Strategy::SHVR, 6.9}, {Strategy::ZIC, 7.1}, {Strategy::ZIP, 8.4}, {Strategy::AA, 9.5}};
}

struct MethodTiming {
  std::uint64_t calls{0};
  std::uint64_t warmup_left{0};
  std::chrono::nanoseconds total{0};

  void add(std::chrono::nanoseconds d) {
    if (warmup_left > 0) {
      --warmup_left;
      return;
    }
    ++calls;
    total += d;
  }
  [[nodiscard]] double mean_us() const {
    return calls == 0 ? 0.0 : std::chrono::duration<double, std::micro>(total).count() / static_cast<double>(calls);
  }
};

struct StrategyTiming {
  MethodTiming get_order;
  MethodTiming respond;
};

/// Forwards to the wrapped trader and times each call into `sink`.
class TimedTrader final : public Trader {
 public:
  TimedTrader(std::unique_ptr<Trader> inner, StrategyTiming* sink)
      : Trader(inner->id(), inner->side(), inner->market()), inner_(std::move(inner)), sink_(sink) {}

  [[nodiscard]] Strategy strategy() const override { return inner_->strategy(); }
  [[nodiscard]] std::unique_ptr<Trader> clone() const override {
    return std::make_unique<TimedTrader>(inner_->clone(), sink_);
  }

  std::optional<Price> get_order(const Assignment& a, const LobSnapshot& book, Rng& rng) override {
    const auto t0 = ProfileClock::now();
    auto q = inner_->get_order(a, book, rng);
    sink_->get_order.add(ProfileClock::now() - t0);
    return q;
  }

  void respond(const MarketEvent& event, const LobSnapshot& book, Rng& rng) override {
    const auto t0 = ProfileClock::now();
    inner_->respond(event, book, rng);
    sink_->respond.add(ProfileClock::now() - t0);
  }

 private:
  std::unique_ptr<Trader> inner_;
  StrategyTiming* sink_;
};

/// One market shape to profile under.
struct ProfileWorkload {
  std::string name;
  SessionConfig session;
};

/// Homogeneous markets of every strategy, balanced pairs and an all-five mix,
/// over several population sizes and replenishment intervals.
inline std::vector<ProfileWorkload> default_workloads() {
  std::vector<ProfileWorkload> out;
  for (int n : {5, 10, 20}) {
    for (int interval : {15, 30, 60}) {
      auto base = SessionConfig{};
      base.schedule.n = n;
      base.schedule.replenish_interval = interval;
      base.limits = LimitMapping::shuffled;
      const std::string tag = "n" + std::to_string(n) + "_r" + std::to_string(interval);
      for (auto s : kAllStrategies) {
        auto w = base;
        w.mix = {{s, n}};
        out.push_back({std::string(strategy_name(s)) + "_" + tag, w});
      }
      if (n % 5 == 0) {
        auto w = base;
        w.mix.clear();
        for (auto s : kAllStrategies) w.mix.push_back({s, n / 5});
        out.push_back({"mixed_" + tag, w});
      }
      if (n % 2 == 0) {
        auto w = base;
        w.mix = balanced_mix(Strategy::AA, Strategy::ZIP, n);
        out.push_back({"AA_ZIP_" + tag, w});
      }
    }
  }
  return out;
}

struct ProfileRow {
  Strategy strategy{Strategy::GVWY};
  double get_order_us{0.0};
  double respond_us{0.0};
  double combined_us{0.0};
  std::uint64_t get_order_calls{0};
  std::uint64_t respond_calls{0};

  [[nodiscard]] std::uint64_t calls() const { return get_order_calls + respond_calls; }
};

struct ProfileReport {
  std::vector<ProfileRow> rows;
  double clock_resolution_us{0.0};
  double clock_overhead_us{0.0};  ///< included in every per-call mean, reported only
  bool precision_warning{false};  ///< clock coarser than 1 microsecond
  std::string workload;
  std::string note{"combined_us = mean get_order + mean respond"};

  [[nodiscard]] const ProfileRow& row(Strategy s) const {
    for (const auto& r : rows)
      if (r.strategy == s) return r;
    throw std::out_of_range("no profile for " + std::string(strategy_name(s)));
  }

  [[nodiscard]] std::map<Strategy, double> combined_times() const {
    std::map<Strategy, double> out;
    for (const auto& r : rows) out[r.strategy] = r.combined_us;
    return out;
  }
};

/// Mean cost of one back-to-back pair of clock reads, the fixed overhead
/// every timed call carries.
inline double measure_clock_overhead_us(int samples = 200000) {
  std::chrono::nanoseconds total{0};
  for (int i = 0; i < samples; ++i) {
    const auto a = ProfileClock::now();
    total += ProfileClock::now() - a;
  }
  return std::chrono::duration<double, std::micro>(total).count() / samples;
}

/// Smallest nonzero step observed on the profiling clock.
inline double measure_clock_resolution_us(int samples = 1000) {
  auto best = ProfileClock::duration::max();
  for (int i = 0; i < samples; ++i) {
    const auto a = ProfileClock::now();
    auto b = ProfileClock::now();
    while (b == a) b = ProfileClock::now();
    best = std::min(best, b - a);
  }
  return std::chrono::duration<double, std::micro>(best).count();
}

struct ProfileOptions {
  std::uint64_t calls{1'000'000};  ///< timed get_order calls wanted per strategy
  std::uint64_t warmup{1000};      ///< calls per strategy and method discarded first
  std::uint64_t seed{1};
};

/// Cycles the workloads with fresh seeds until every strategy present has
/// `calls` timed get_order calls. Single-threaded by contract.
inline ProfileReport profile_strategies(const std::vector<ProfileWorkload>& workloads, const ProfileOptions& options) {
  if (workloads.empty()) throw ConfigError("profiling needs at least one workload");
  if (options.calls == 0) throw ConfigError("profiling needs a positive call count");
  std::map<Strategy, StrategyTiming> timing;
  for (const auto& w : workloads)
    for (const auto& m : w.session.mix)
      if (m.count > 0 && !timing.contains(m.strategy))
        timing[m.strategy] = {{0, options.warmup, {}}, {0, options.warmup, {}}};

  auto done = [&] {
    for (const auto& [s, t] : timing)
      if (t.get_order.calls < options.calls) return false;
    return true;
  };

  std::uint64_t round = 0;
  while (!done()) {
    for (const auto& w : workloads) {
      bool wanted = false;
      for (const auto& m : w.session.mix)
        if (m.count > 0 && timing[m.strategy].get_order.calls < options.calls) wanted = true;
      if (!wanted) continue;
      SessionConfig sc = w.session;
      sc.seed = derive_seed(options.seed, round);
      run_session(sc, [&](std::unique_ptr<Trader> t) -> std::unique_ptr<Trader> {
        auto* sink = &timing[t->strategy()];
        return std::make_unique<TimedTrader>(std::move(t), sink);
      });
    }
    ++round;
  }

  ProfileReport report;
  report.clock_resolution_us = measure_clock_resolution_us();
  report.clock_overhead_us = measure_clock_overhead_us();
  report.precision_warning = report.clock_resolution_us > 1.0;
  report.workload = std::to_string(workloads.size()) + " workloads, " + std::to_string(round) + " rounds";
  for (auto s : kAllStrategies) {
    auto it = timing.find(s);
    if (it == timing.end()) continue;
    const auto& t = it->second;
    ProfileRow r;
    r.strategy = s;
    r.get_order_us = t.get_order.mean_us();
    r.respond_us = t.respond.mean_us();
    r.combined_us = r.get_order_us + r.respond_us;
    r.get_order_calls = t.get_order.calls;
    r.respond_calls = t.respond.calls;
    report.rows.push_back(r);
  }
  return report;
}

class DegenerateMeasurement : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Each strategy's time divided by the baseline's.
inline std::map<Strategy, double> ratios_to_baseline(const std::map<Strategy, double>& times, Strategy baseline) {
  auto it = times.find(baseline);
  if (it == times.end()) throw ConfigError("baseline " + std::string(strategy_name(baseline)) + " not profiled");
  if (!(it->second > 0.0))
    throw DegenerateMeasurement("baseline " + std::string(strategy_name(baseline)) + " has zero mean time");
  std::map<Strategy, double> out;
  for (const auto& [s, t] : times) out[s] = t / it->second;
  return out;
}

inline std::map<Strategy, double> ratios_to_baseline(const ProfileReport& report, Strategy baseline) {
  return ratios_to_baseline(report.combined_times(), baseline);
}

// ---- CSV ---------------------------------------------------------------------

/// `strategy,get_order_us,respond_us,combined_us,calls`, plus a ratio column
/// when a baseline is given.
inline void write_profile_csv(std::ostream& out, const ProfileReport& report,
                              std::optional<Strategy> baseline = std::nullopt) {
  std::map<Strategy, double> ratios;
  if (baseline) ratios = ratios_to_baseline(report, *baseline);
  out << "strategy,get_order_us,respond_us,combined_us,calls";
  if (baseline) out << ",ratio_" << strategy_name(*baseline);
  out << '\n';
  char buf[64];
  for (const auto& r : report.rows) {
    out << strategy_name(r.strategy);
    for (double v : {r.get_order_us, r.respond_us, r.combined_us}) {
      std::snprintf(buf, sizeof buf, ",%.4f", v);
      out << buf;
    }
    out << ',' << r.calls();
    if (baseline) {
      std::snprintf(buf, sizeof buf, ",%.4f", ratios[r.strategy]);
      out << buf;
    }
    out << '\n';
  }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

}  // namespace detail

/// Reads per-strategy times from a profile CSV. Uses `combined_us` when the
/// header has it, otherwise a `time_us` column.
inline std::map<Strategy, double> read_strategy_times_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("reaction time CSV is empty");
  const auto header = detail::split_csv_line(line);
  int col_strategy = -1, col_time = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    if (header[i] == "strategy") col_strategy = i;
    if (header[i] == "combined_us" || (header[i] == "time_us" && col_time < 0)) col_time = i;
  }
  if (col_strategy < 0 || col_time < 0)
    throw ConfigError("reaction time CSV needs 'strategy' and 'combined_us' columns");
  std::map<Strategy, double> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = detail::split_csv_line(line);
    if (static_cast<int>(cells.size()) <= std::max(col_strategy, col_time))
      throw ConfigError("reaction time CSV line " + std::to_string(lineno) + " is short");
    const auto s = parse_strategy(cells[col_strategy]);
    if (!s) throw ConfigError("reaction time CSV line " + std::to_string(lineno) + ": unknown strategy '" +
                              cells[col_strategy] + "'");
    double t = 0.0;
    try {
      t = std::stod(cells[col_time]);
    } catch (const std::exception&) {
      throw ConfigError("reaction time CSV line " + std::to_string(lineno) + ": bad time '" + cells[col_time] + "'");
    }
    if (!(t > 0.0)) throw ConfigError("reaction time CSV line " + std::to_string(lineno) + ": time must be positive");
    out[*s] = t;
  }
  return out;
}

}  // namespace reactsim
