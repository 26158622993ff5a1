// reactsim: run experiments, sweeps, profiling and single-session replays.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "reactsim/reactsim.hpp"

namespace fs = std::filesystem;
using namespace reactsim;

namespace {

struct Common {
  std::string config;
  std::string out{"out"};
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<unsigned> workers;
  std::string times;
  bool force{false};
};

RunConfig load_or_default(const Common& c) {
  RunConfig rc = c.config.empty() ? parse_config("") : load_config(c.config);
  auto& ec = rc.experiment;
  if (c.seed) ec.master_seed = *c.seed;
  if (c.reps) {
    if (*c.reps < 2) throw ConfigError("--reps must be at least 2");
    ec.repetitions = *c.reps;
  }
  if (c.workers) ec.workers = *c.workers;
  if (!c.times.empty()) {
    const auto layout = layout_traders(ec.session.mix);
    ec.session.selection.kind = SelectionKind::speed_proportional;
    ec.session.selection.reaction_times = parse_reaction_times(c.times, layout);
  }
  return rc;
}

void print_summary(const ExperimentSummary& s) {
  std::printf("%s (%zu repetitions)\n", s.condition.c_str(), s.repetitions);
  for (const auto& g : s.groups)
    std::printf("  %-14s mean %s  +/- %s\n", g.name.c_str(), format_fixed(g.mean, 3).c_str(),
                format_fixed(g.ci_half, 3).c_str());
  for (const auto& c : s.comparisons)
    std::printf("  %s vs %s: t = %.3f, p = %.3g\n", c.group_a.c_str(), c.group_b.c_str(), c.test.t, c.test.p);
}

int cmd_run(const Common& c) {
  const auto rc = load_or_default(c);
  const fs::path dir = c.out;
  prepare_output_dir(dir, {"summary.csv", "sessions.csv", "comparisons.csv"}, c.force);
  const auto s = run_experiment(rc.experiment);
  write_file_atomic(dir / "summary.csv", c.force, [&](std::ostream& o) { write_summary_csv(o, s); });
  write_file_atomic(dir / "sessions.csv", c.force, [&](std::ostream& o) { write_sessions_csv(o, s); });
  write_file_atomic(dir / "comparisons.csv", c.force, [&](std::ostream& o) { write_comparisons_csv(o, s); });
  print_summary(s);
  return 0;
}

std::vector<double> parse_r_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : detail::split(text, ','))
    if (!item.empty()) out.push_back(detail::parse_number<double>("sweep", "--R", item));
  if (out.empty()) throw ConfigError("--R needs at least one value");
  return out;
}

int cmd_sweep(const Common& c, const std::string& pair, const std::string& r_list, bool counterbalance) {
  const auto parts = detail::split(pair, ':');
  if (parts.size() != 2 || parts[0] != "AA") throw ConfigError("--pair must look like AA:OTHER");
  const auto other = parse_strategy(parts[1]);
  if (!other) throw ConfigError("--pair: unknown strategy '" + parts[1] + "'");
  const auto rs = parse_r_list(r_list);
  auto rc = load_or_default(c);
  const fs::path dir = c.out;
  prepare_output_dir(dir, {"sweep.csv"}, c.force);
  const auto& ec = rc.experiment;
  const auto result =
      sensitivity_sweep(ec.session, *other, rs, ec.repetitions, ec.master_seed, ec.workers, counterbalance);
  write_file_atomic(dir / "sweep.csv", c.force, [&](std::ostream& o) { write_sweep_csv(o, result); });
  for (const auto& p : result.points)
    std::printf("R=%-6g AA %s  %s %s  p=%.3g\n", p.relative_time, format_fixed(p.mean_aa, 3).c_str(),
                parts[1].c_str(), format_fixed(p.mean_other, 3).c_str(), p.p);
  if (result.inversion)
    std::printf("inversion at R=%g\n", *result.inversion);
  else
    std::printf("no inversion in the swept range\n");
  return 0;
}

int cmd_profile(const Common& c, std::uint64_t calls, const std::string& baseline) {
  const auto base = parse_strategy(baseline);
  if (!base) throw ConfigError("--baseline: unknown strategy '" + baseline + "'");
  const fs::path dir = c.out;
  prepare_output_dir(dir, {"profile.csv"}, c.force);
  ProfileOptions opts;
  opts.calls = calls;
  if (c.seed) opts.seed = *c.seed;
  const auto report = profile_strategies(default_workloads(), opts);
  write_file_atomic(dir / "profile.csv", c.force, [&](std::ostream& o) { write_profile_csv(o, report, *base); });
  write_profile_csv(std::cout, report, *base);
  std::printf("# clock resolution %.4f us, per-call clock overhead %.4f us%s\n", report.clock_resolution_us,
              report.clock_overhead_us, report.precision_warning ? " (WARNING: coarser than 1 us)" : "");
  std::printf("# %s; %s\n", report.workload.c_str(), report.note.c_str());
  return 0;
}

int cmd_replay(const Common& c) {
  if (!c.seed) throw ConfigError("replay needs --seed");
  auto rc = load_or_default(c);
  auto sc = rc.experiment.session;
  sc.seed = *c.seed;
  sc.record_quotes = true;
  const fs::path dir = c.out;
  prepare_output_dir(dir, {"trades.csv", "quotes.csv", "schedule.csv"}, c.force);
  const auto r = run_session(sc);
  std::vector<Assignment> assignments;
  for (const auto& t : r.traders) assignments.push_back({t.info.id, t.info.side, t.limit, 0});
  write_file_atomic(dir / "trades.csv", c.force, [&](std::ostream& o) { write_trade_tape_csv(o, r.trades); });
  write_file_atomic(dir / "quotes.csv", c.force, [&](std::ostream& o) { write_quote_tape_csv(o, r.quotes); });
  write_file_atomic(dir / "schedule.csv", c.force, [&](std::ostream& o) { write_schedule_csv(o, assignments); });
  std::printf("seed %llu: %zu trades, %zu quotes\n", static_cast<unsigned long long>(sc.seed), r.trades.size(),
              r.quotes.size());
  for (const auto& m : sc.mix)
    std::printf("  %-5s mean profit %s\n", std::string(strategy_name(m.strategy)).c_str(),
                format_fixed(r.strategy_mean(m.strategy), 3).c_str());
  return 0;
}

void add_common(CLI::App* sub, Common& c, bool with_config = true) {
  if (with_config) sub->add_option("--config", c.config, "INI configuration file")->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_option("--seed", c.seed, "master seed (session seed for replay)");
  sub->add_flag("--force", c.force, "overwrite existing output files");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-time continuous double auction simulator with reaction-time selection models"};
  app.require_subcommand(1);

  Common c;
  std::string pair{"AA:SHVR"};
  std::string r_list{"1,1.25,1.5,2,4,8,16,40"};
  bool no_counterbalance = false;
  std::uint64_t calls = 1'000'000;
  std::string baseline{"SHVR"};

  auto* run = app.add_subcommand("run", "replicated experiment from a config");
  add_common(run, c);
  run->add_option("--reps", c.reps, "repetitions");
  run->add_option("--workers", c.workers, "parallel sessions (0: all cores)");
  run->add_option("--times", c.times, "reaction times: table2, STRATEGY:TIME list or CSV path; selects proportional");

  auto* sweep = app.add_subcommand("sweep", "AA reaction-time sensitivity sweep");
  add_common(sweep, c);
  sweep->add_option("--pair", pair, "AA:OTHER")->capture_default_str();
  sweep->add_option("--R", r_list, "comma-separated AA reaction times relative to the competitor")
      ->capture_default_str();
  sweep->add_option("--reps", c.reps, "repetitions per R");
  sweep->add_option("--workers", c.workers, "parallel sessions (0: all cores)");
  sweep->add_flag("--no-counterbalance", no_counterbalance, "keep the mix order fixed across repetitions");

  auto* profile = app.add_subcommand("profile", "time get_order and respond per strategy");
  add_common(profile, c, false);
  profile->add_option("--calls", calls, "timed get_order calls per strategy")->capture_default_str();
  profile->add_option("--baseline", baseline, "strategy for the ratio column")->capture_default_str();

  auto* replay = app.add_subcommand("replay", "one session's trade, quote and schedule tapes");
  add_common(replay, c);
  replay->add_option("--times", c.times, "reaction times: table2, STRATEGY:TIME list or CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(c);
    if (*sweep) return cmd_sweep(c, pair, r_list, !no_counterbalance);
    if (*profile) return cmd_profile(c, calls, baseline);
    if (*replay) return cmd_replay(c);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
