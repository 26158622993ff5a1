#pragma once

// CSV outputs of experiments and sweeps, and the write-then-rename rule that
// keeps a failed run from leaving half-written files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "reactsim/config.hpp"
#include "reactsim/experiment.hpp"

namespace reactsim {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_fixed(double v, int decimals = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  if (s == "-0.00" || s == "-0.0" || s == "-0") s.erase(0, 1);
  return s;
}

inline std::string format_general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Creates `dir` and refuses, before anything is written, if any of `names`
/// already exists there and `force` is off.
inline void prepare_output_dir(const std::filesystem::path& dir, const std::vector<std::string>& names, bool force) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create output directory " + dir.string() + ": " + ec.message());
  if (force) return;
  for (const auto& n : names)
    if (std::filesystem::exists(dir / n))
      throw OutputError((dir / n).string() + " already exists; pass --force to overwrite");
}

/// Writes to a temporary sibling and renames it over `target` on success.
inline void write_file_atomic(const std::filesystem::path& target, bool force,
                              const std::function<void(std::ostream&)>& body) {
  if (!force && std::filesystem::exists(target))
    throw OutputError(target.string() + " already exists; pass --force to overwrite");
  auto tmp = target;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot open " + tmp.string() + " for writing");
    try {
      body(out);
    } catch (...) {
      out.close();
      std::filesystem::remove(tmp);
      throw;
    }
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw OutputError("write failed for " + target.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw OutputError("cannot move " + tmp.string() + " to " + target.string() + ": " + ec.message());
  }
}

// ---- experiment summaries ------------------------------------------------------

inline void write_summary_csv(std::ostream& out, const ExperimentSummary& s, bool header = true) {
  if (header) out << "condition,strategy,mean,ci_half,n\n";
  for (const auto& g : s.groups)
    out << s.condition << ',' << g.name << ',' << format_fixed(g.mean) << ',' << format_fixed(g.ci_half) << ','
        << g.samples.size() << '\n';
}

inline void write_comparisons_csv(std::ostream& out, const ExperimentSummary& s, bool header = true) {
  if (header) out << "condition,group_a,group_b,mean_a,mean_b,t,df,p\n";
  for (const auto& c : s.comparisons)
    out << s.condition << ',' << c.group_a << ',' << c.group_b << ',' << format_fixed(s.group(c.group_a).mean) << ','
        << format_fixed(s.group(c.group_b).mean) << ',' << format_general(c.test.t) << ','
        << format_general(c.test.df) << ',' << format_general(c.test.p) << '\n';
}

/// One row per session and group: the group's total profit and member count,
/// from which the per-trader sample is recomputed exactly.
inline void write_sessions_csv(std::ostream& out, const ExperimentSummary& s, bool header = true) {
  if (header) out << "condition,repetition,seed,group,traders,total_profit,mean_profit\n";
  for (const auto& rec : s.sessions)
    for (std::size_t gi = 0; gi < s.groups.size(); ++gi)
      out << s.condition << ',' << rec.repetition << ',' << rec.seed << ',' << s.groups[gi].name << ','
          << s.groups[gi].traders << ',' << format_ticks(rec.group_totals[gi]) << ','
          << format_fixed(s.groups[gi].samples[rec.repetition]) << '\n';
}

/// Rebuilds summaries from a sessions CSV, one per condition in order of
/// first appearance, with the given comparisons recomputed.
inline std::vector<ExperimentSummary> read_sessions_csv(
    std::istream& in, const std::vector<std::pair<std::string, std::string>>& comparisons = {}) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != "condition,repetition,seed,group,traders,total_profit,mean_profit")
    throw ConfigError("sessions CSV header mismatch");
  struct Acc {
    std::vector<std::string> groups;
    std::map<std::string, std::size_t> traders;
    std::map<std::size_t, SessionRecord> sessions;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> acc;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto c = detail::split(line, ',');
    if (c.size() != 7) throw ConfigError("sessions CSV line " + std::to_string(lineno) + ": expected 7 fields");
    if (!acc.contains(c[0])) order.push_back(c[0]);
    auto& a = acc[c[0]];
    const auto rep = detail::parse_number<std::size_t>("sessions", "repetition", c[1]);
    const auto seed = detail::parse_number<std::uint64_t>("sessions", "seed", c[2]);
    if (std::find(a.groups.begin(), a.groups.end(), c[3]) == a.groups.end()) a.groups.push_back(c[3]);
    a.traders[c[3]] = detail::parse_number<std::size_t>("sessions", "traders", c[4]);
    auto& rec = a.sessions[rep];
    rec.repetition = rep;
    rec.seed = seed;
    rec.group_totals.push_back(parse_ticks(c[5]));
  }
  std::vector<ExperimentSummary> out;
  for (const auto& cond : order) {
    const auto& a = acc[cond];
    ExperimentSummary s;
    s.condition = cond;
    s.repetitions = a.sessions.size();
    for (const auto& [rep, rec] : a.sessions) {
      if (rec.group_totals.size() != a.groups.size())
        throw ConfigError("sessions CSV: repetition " + std::to_string(rep) + " lacks some groups");
      s.sessions.push_back(rec);
    }
    for (std::size_t gi = 0; gi < a.groups.size(); ++gi) {
      GroupStats gs;
      gs.name = a.groups[gi];
      gs.traders = a.traders.at(gs.name);
      for (const auto& rec : s.sessions)
        gs.samples.push_back(static_cast<double>(rec.group_totals[gi]) /
                             (static_cast<double>(gs.traders) * static_cast<double>(kTicksPerUnit)));
      const auto ci = confidence_interval_95(gs.samples);
      gs.mean = ci.mean;
      gs.ci_half = ci.half_width;
      s.groups.push_back(std::move(gs));
    }
    for (const auto& [ga, gb] : comparisons) {
      bool have_a = false, have_b = false;
      for (const auto& g : s.groups) {
        have_a |= g.name == ga;
        have_b |= g.name == gb;
      }
      if (have_a && have_b) s.comparisons.push_back({ga, gb, two_sample_t_test(s.group(ga).samples, s.group(gb).samples)});
    }
    out.push_back(std::move(s));
  }
  return out;
}

// ---- sweep ------------------------------------------------------------------

inline void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  out << "R,mean_AA,mean_other,ci_AA,ci_other,p\n";
  for (const auto& p : r.points)
    out << format_general(p.relative_time) << ',' << format_fixed(p.mean_aa) << ',' << format_fixed(p.mean_other)
        << ',' << format_fixed(p.ci_aa) << ',' << format_fixed(p.ci_other) << ',' << format_general(p.p) << '\n';
}

}  // namespace reactsim
