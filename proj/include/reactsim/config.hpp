#pragma once

// INI run configuration: [market], [traders], [selection], [experiment] and
// an optional [agents] section of learning knobs.

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "reactsim/experiment.hpp"
#include "reactsim/profiler.hpp"

namespace reactsim {

enum class GroupScheme { strategy, halves, positions };

struct RunConfig {
  ExperimentConfig experiment;
  GroupScheme groups{GroupScheme::strategy};
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) out.push_back(trim(part));
  return out;
}

inline std::string key_name(const std::string& section, const std::string& key) {
  return "[" + section + "] " + key;
}

template <class T>
T parse_number(const std::string& section, const std::string& key, const std::string& text) {
  try {
    std::size_t pos = 0;
    T v{};
    if constexpr (std::is_floating_point_v<T>) {
      v = static_cast<T>(std::stod(text, &pos));
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!text.empty() && text.front() == '-') throw std::invalid_argument("negative");
      v = static_cast<T>(std::stoull(text, &pos));
    } else {
      v = static_cast<T>(std::stoll(text, &pos));
    }
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key_name(section, key) + ": not a valid number '" + text + "'");
  }
}

inline bool parse_bool(const std::string& section, const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw ConfigError(key_name(section, key) + ": expected true or false, got '" + text + "'");
}

inline Price parse_price_key(const std::string& section, const std::string& key, const std::string& text) {
  try {
    return Price{parse_ticks(text)};
  } catch (const std::exception&) {
    throw ConfigError(key_name(section, key) + ": not a price with at most two decimals '" + text + "'");
  }
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// `trader_id,value` rows, header required.
inline std::map<TraderId, double> read_trader_values_csv(std::istream& in, const std::string& what) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(what + " CSV is empty");
  const auto header = split(line, ',');
  if (header.size() < 2 || header[0] != "trader_id")
    throw ConfigError(what + " CSV must start with the header 'trader_id,value'");
  std::map<TraderId, double> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() < 2) throw ConfigError(what + " CSV line " + std::to_string(lineno) + " is short");
    const auto id = parse_number<TraderId>(what, "trader_id", cells[0]);
    out[id] = parse_number<double>(what, "value", cells[1]);
  }
  return out;
}

}  // namespace detail

/// Per-strategy times from `table2`, an inline list `AA:9.5,SHVR:6.9`, or a
/// CSV path (profile export with a strategy column).
inline std::map<Strategy, double> parse_strategy_times(const std::string& value,
                                                       const std::filesystem::path& base_dir = ".") {
  if (value == "table2") return table2_times();
  if (value.find(':') != std::string::npos && value.find('/') == std::string::npos) {
    std::map<Strategy, double> out;
    for (const auto& item : detail::split(value, ',')) {
      const auto kv = detail::split(item, ':');
      if (kv.size() != 2) throw ConfigError("[selection] times: expected STRATEGY:TIME, got '" + item + "'");
      const auto s = parse_strategy(kv[0]);
      if (!s) throw ConfigError("[selection] times: unknown strategy '" + kv[0] + "'");
      const double t = detail::parse_number<double>("selection", "times", kv[1]);
      if (!(t > 0.0)) throw ConfigError("[selection] times: time for " + kv[0] + " must be positive");
      out[*s] = t;
    }
    return out;
  }
  std::istringstream in(detail::read_text_file(base_dir / value));
  return read_strategy_times_csv(in);
}

/// Fills per-trader reaction times from `value`: a per-strategy form (see
/// parse_strategy_times) or a `trader_id,value` CSV.
inline ReactionTimeTable parse_reaction_times(const std::string& value, std::span<const TraderInfo> layout,
                                              const std::filesystem::path& base_dir = ".") {
  if (value != "table2" && value.find(':') == std::string::npos) {
    const auto text = detail::read_text_file(base_dir / value);
    if (text.rfind("trader_id", 0) == 0) {
      std::istringstream in(text);
      const auto values = detail::read_trader_values_csv(in, "reaction time");
      ReactionTimeTable table;
      table.times.resize(layout.size(), 0.0);
      for (const auto& t : layout) {
        auto it = values.find(t.id);
        if (it == values.end()) throw ConfigError("reaction time CSV has no row for trader " + std::to_string(t.id));
        table.times[t.id] = it->second;
      }
      table.validate();
      return table;
    }
  }
  return reaction_times_by_strategy(layout, parse_strategy_times(value, base_dir));
}

/// Tournament ranks: `halves`, an inline list indexed by trader id, or a
/// `trader_id,value` CSV path.
inline std::vector<int> parse_ranks(const std::string& value, std::span<const TraderInfo> layout,
                                    const std::filesystem::path& base_dir = ".") {
  if (value == "halves") return half_split_ranks(layout);
  std::vector<int> ranks(layout.size(), 0);
  if (value.find_first_not_of("0123456789, ") == std::string::npos) {
    const auto items = detail::split(value, ',');
    if (items.size() != layout.size())
      throw ConfigError("[selection] ranks: expected " + std::to_string(layout.size()) + " ranks, got " +
                        std::to_string(items.size()));
    for (std::size_t i = 0; i < items.size(); ++i) ranks[i] = detail::parse_number<int>("selection", "ranks", items[i]);
    return ranks;
  }
  std::istringstream in(detail::read_text_file(base_dir / value));
  const auto values = detail::read_trader_values_csv(in, "rank");
  for (const auto& t : layout) {
    auto it = values.find(t.id);
    if (it == values.end()) throw ConfigError("rank CSV has no row for trader " + std::to_string(t.id));
    ranks[t.id] = static_cast<int>(it->second);
  }
  return ranks;
}

inline std::vector<std::pair<std::string, std::string>> parse_comparisons(const std::string& value) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : detail::split(value, ',')) {
    if (item.empty()) continue;
    const auto ab = detail::split(item, ':');
    if (ab.size() != 2 || ab[0].empty() || ab[1].empty())
      throw ConfigError("[experiment] compare: expected A:B, got '" + item + "'");
    out.emplace_back(ab[0], ab[1]);
  }
  return out;
}

/// Parses INI text. Relative paths resolve against `base_dir`. Missing keys
/// keep their defaults: 10 traders per side, limits 0.10..1.90, 330 steps,
/// replenishment every 30, 100 repetitions.
inline RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".") {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  RunConfig rc;
  auto& ec = rc.experiment;
  auto& sc = ec.session;
  std::map<std::string, std::map<std::string, std::string>> sections;
  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty())
      throw ConfigError("key '" + name + "' must sit inside a section");
    for (const auto& [key, value] : section) sections[name][key] = detail::trim(value.data());
  }

  static const std::set<std::string> known{"market", "traders", "selection", "experiment", "agents"};
  for (const auto& [name, _] : sections)
    if (!known.contains(name)) throw ConfigError("unknown section [" + name + "]");

  auto take = [&](const std::string& section, const std::string& key) -> std::optional<std::string> {
    auto s = sections.find(section);
    if (s == sections.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    std::string v = k->second;
    s->second.erase(k);
    return v;
  };
  auto reject_leftovers = [&](const std::string& section) {
    auto s = sections.find(section);
    if (s != sections.end() && !s->second.empty())
      throw ConfigError(detail::key_name(section, s->second.begin()->first) + ": unknown key");
  };

  // [market]
  if (auto v = take("market", "n")) sc.schedule.n = detail::parse_number<int>("market", "n", *v);
  if (auto v = take("market", "price_low")) sc.schedule.price_low = detail::parse_price_key("market", "price_low", *v);
  if (auto v = take("market", "price_high"))
    sc.schedule.price_high = detail::parse_price_key("market", "price_high", *v);
  if (auto v = take("market", "session_length"))
    sc.schedule.session_length = detail::parse_number<int>("market", "session_length", *v);
  if (auto v = take("market", "replenish_interval"))
    sc.schedule.replenish_interval = detail::parse_number<int>("market", "replenish_interval", *v);
  if (auto v = take("market", "price_min")) sc.bounds.min = detail::parse_price_key("market", "price_min", *v);
  if (auto v = take("market", "price_max")) sc.bounds.max = detail::parse_price_key("market", "price_max", *v);
  if (auto v = take("market", "limits")) {
    if (*v == "indexed") sc.limits = LimitMapping::indexed;
    else if (*v == "shuffled") sc.limits = LimitMapping::shuffled;
    else if (*v == "rotated") sc.limits = LimitMapping::rotated;
    else throw ConfigError("[market] limits: expected indexed, shuffled or rotated, got '" + *v + "'");
  }
  reject_leftovers("market");

  // [traders]: STRATEGY = count per side, in listed order
  if (auto s = tree.get_child_optional("traders")) {
    sc.mix.clear();
    for (const auto& [key, value] : *s) {
      const auto strat = parse_strategy(key);
      if (!strat) throw ConfigError(detail::key_name("traders", key) + ": unknown strategy");
      sc.mix.push_back({*strat, detail::parse_number<int>("traders", key, detail::trim(value.data()))});
    }
    sections.erase("traders");
  } else {
    sc.mix = {{Strategy::ZIC, sc.schedule.n}};
  }
  sc.validate();
  const auto layout = layout_traders(sc.mix);

  // [selection]
  const auto model = take("selection", "model").value_or("random");
  const auto kind = parse_selection(model);
  if (!kind) throw ConfigError("[selection] model: unknown selection model '" + model + "'");
  sc.selection.kind = *kind;
  const auto times = take("selection", "times");
  const auto ranks = take("selection", "ranks");
  if (*kind == SelectionKind::speed_proportional) {
    if (!times)
      throw ConfigError("[selection] model = proportional needs reaction times: set times = table2, "
                        "STRATEGY:TIME pairs, or a times CSV path");
    sc.selection.reaction_times = parse_reaction_times(*times, layout, base_dir);
  } else if (times) {
    throw ConfigError("[selection] times: only used by the proportional model");
  }
  if (*kind == SelectionKind::tournament_rank) {
    sc.selection.ranks = parse_ranks(ranks.value_or("halves"), layout, base_dir);
  } else if (ranks) {
    throw ConfigError("[selection] ranks: only used by the rank model");
  }
  reject_leftovers("selection");

  // [agents]
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto dbl = [](double& field) -> Setter {
    return [&field](const std::string& key, const std::string& v) { field = detail::parse_number<double>("agents", key, v); };
  };
  auto integer = [](auto& field) -> Setter {
    return [&field](const std::string& key, const std::string& v) {
      field = detail::parse_number<std::remove_reference_t<decltype(field)>>("agents", key, v);
    };
  };
  auto& aa = sc.agents.aa;
  auto& zip = sc.agents.zip;
  const std::map<std::string, Setter> agent_keys{
      {"aa_ema_alpha", dbl(aa.ema_alpha)},
      {"aa_window", integer(aa.window)},
      {"aa_eta", dbl(aa.eta)},
      {"aa_theta_init", dbl(aa.theta_init)},
      {"aa_impatience", integer(aa.impatience)},
      {"aa_target_ceiling",
       [&aa](const std::string& key, const std::string& v) {
         aa.target_ceiling = detail::parse_price_key("agents", key, v).ticks;
       }},
      {"aa_update_on_quotes",
       [&aa](const std::string& key, const std::string& v) {
         aa.update_on_quotes = detail::parse_bool("agents", key, v);
       }},
      {"zip_beta_lo", dbl(zip.beta_lo)},
      {"zip_beta_hi", dbl(zip.beta_hi)},
      {"zip_gamma_lo", dbl(zip.gamma_lo)},
      {"zip_gamma_hi", dbl(zip.gamma_hi)},
      {"zip_margin_lo", dbl(zip.margin_lo)},
      {"zip_margin_hi", dbl(zip.margin_hi)},
  };
  if (auto s = sections.find("agents"); s != sections.end()) {
    for (const auto& [key, value] : s->second) {
      auto it = agent_keys.find(key);
      if (it == agent_keys.end()) throw ConfigError(detail::key_name("agents", key) + ": unknown key");
      it->second(key, value);
    }
    sections.erase(s);
  }

  // [experiment]
  if (auto v = take("experiment", "repetitions"))
    ec.repetitions = detail::parse_number<std::size_t>("experiment", "repetitions", *v);
  if (auto v = take("experiment", "seed")) ec.master_seed = detail::parse_number<std::uint64_t>("experiment", "seed", *v);
  if (auto v = take("experiment", "condition")) ec.condition = *v;
  if (auto v = take("experiment", "workers")) ec.workers = detail::parse_number<unsigned>("experiment", "workers", *v);
  if (auto v = take("experiment", "counterbalance"))
    ec.counterbalance = detail::parse_bool("experiment", "counterbalance", *v);
  if (auto v = take("experiment", "groups")) {
    if (*v == "strategy") rc.groups = GroupScheme::strategy;
    else if (*v == "halves") rc.groups = GroupScheme::halves;
    else if (*v == "positions") rc.groups = GroupScheme::positions;
    else throw ConfigError("[experiment] groups: expected strategy, halves or positions, got '" + *v + "'");
  }
  const auto compare = take("experiment", "compare");
  reject_leftovers("experiment");

  switch (rc.groups) {
    case GroupScheme::strategy: break;
    case GroupScheme::halves: ec.groups = half_split_groups(layout, sc.schedule.n); break;
    case GroupScheme::positions:
      for (int p = 0; p < sc.schedule.n; ++p) ec.groups.push_back(position_group(layout, Side::bid, p));
      for (int p = 0; p < sc.schedule.n; ++p) ec.groups.push_back(position_group(layout, Side::ask, p));
      for (int p = 0; p < sc.schedule.n; ++p) ec.groups.push_back(position_pair_group(layout, p));
      break;
  }
  if (ec.counterbalance && rc.groups != GroupScheme::strategy)
    throw ConfigError("[experiment] counterbalance: only valid with groups = strategy");

  if (compare) {
    ec.comparisons = parse_comparisons(*compare);
  } else if (rc.groups == GroupScheme::strategy && sc.mix.size() == 2) {
    ec.comparisons = {{std::string(strategy_name(sc.mix[0].strategy)), std::string(strategy_name(sc.mix[1].strategy))}};
  } else if (rc.groups == GroupScheme::halves) {
    ec.comparisons = {{"fast_buyers", "slow_buyers"}, {"slow_sellers", "fast_sellers"}, {"sellers", "buyers"}};
  } else if (rc.groups == GroupScheme::positions) {
    const auto last = std::to_string(sc.schedule.n - 1);
    ec.comparisons = {{"buyer_0", "buyer_" + last}, {"seller_" + last, "seller_0"}, {"position_" + last, "position_0"}};
  }
  std::set<std::string> names;
  if (ec.groups.empty())
    for (const auto& g : strategy_groups(layout)) names.insert(g.name);
  else
    for (const auto& g : ec.groups) names.insert(g.name);
  for (const auto& [a, b] : ec.comparisons)
    for (const auto& g : {a, b})
      if (!names.contains(g)) throw ConfigError("[experiment] compare: no group named '" + g + "'");
  if (ec.repetitions < 2) throw ConfigError("[experiment] repetitions: must be at least 2");
  return rc;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(detail::read_text_file(path), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace reactsim
