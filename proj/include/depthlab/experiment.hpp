#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "depthlab/bootstrap.hpp"
#include "depthlab/elo.hpp"
#include "depthlab/errors.hpp"
#include "depthlab/game.hpp"
#include "depthlab/match.hpp"
#include "depthlab/parallel.hpp"
#include "depthlab/pie_rules.hpp"
#include "depthlab/player_spec.hpp"
#include "depthlab/rng.hpp"
#include "depthlab/winrate_table.hpp"

namespace depthlab {

enum class ExperimentRule { Rdr, RdrPr, RdrGfm, Free };

inline std::string_view to_string(ExperimentRule r) {
  switch (r) {
    case ExperimentRule::Rdr: return "RDR";
    case ExperimentRule::RdrPr: return "RDR+PR";
    case ExperimentRule::RdrGfm: return "RDR+GFM";
    case ExperimentRule::Free: return "FREE";
  }
  return "?";
}

inline ExperimentRule parse_rule(std::string_view s) {
  std::string u(s);
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (u == "RDR") return ExperimentRule::Rdr;
  if (u == "RDR+PR" || u == "PR") return ExperimentRule::RdrPr;
  if (u == "RDR+GFM" || u == "GFM") return ExperimentRule::RdrGfm;
  if (u == "FREE") return ExperimentRule::Free;
  throw ConfigError("unknown rule '" + std::string(s) + "' (RDR, RDR+PR, RDR+GFM, FREE)");
}

struct OpeningSelection {
  enum class Mode { Canonical, All, Explicit };
  Mode mode = Mode::Canonical;
  std::vector<std::string> cells;  // Explicit only

  friend bool operator==(const OpeningSelection&, const OpeningSelection&) = default;
};

struct ExperimentConfig {
  GameId game = GameId::NoGo;
  int size = 5;
  std::vector<PlayerSpec> pool;
  OpeningSelection openings;
  int games_per_cell = 100;
  std::uint64_t master_seed = 0;
  std::vector<ExperimentRule> rules{ExperimentRule::Rdr, ExperimentRule::RdrPr, ExperimentRule::RdrGfm};
  std::string output;  // path prefix; empty = no persistence
  int bootstrap_resamples = 1000;

  bool wants(ExperimentRule r) const { return std::find(rules.begin(), rules.end(), r) != rules.end(); }
  bool wants_rational() const {
    return wants(ExperimentRule::Rdr) || wants(ExperimentRule::RdrPr) || wants(ExperimentRule::RdrGfm);
  }

  void validate() const {
    if (pool.size() < 2) throw ConfigError("pool needs at least 2 players, got " + std::to_string(pool.size()));
    std::set<std::string> labels;
    for (const auto& p : pool) {
      p.validate();
      if (!labels.insert(p.label).second) throw ConfigError("duplicate player label '" + p.label + "'");
    }
    if (games_per_cell < 1) throw ConfigError("games_per_cell must be >= 1");
    if (rules.empty()) throw ConfigError("rules must not be empty");
    if (bootstrap_resamples < 100) throw ConfigError("bootstrap_resamples must be >= 100");
    visit_game(game, [&]<class S>(std::type_identity<S>) { (void)S::initial(size); });
    if (openings.mode == OpeningSelection::Mode::Explicit && openings.cells.empty())
      throw ConfigError("explicit opening list is empty");
  }
};

inline void to_json(nlohmann::json& j, const OpeningSelection& o) {
  switch (o.mode) {
    case OpeningSelection::Mode::Canonical: j = "canonical"; break;
    case OpeningSelection::Mode::All: j = "all"; break;
    case OpeningSelection::Mode::Explicit: j = o.cells; break;
  }
}

inline void from_json(const nlohmann::json& j, OpeningSelection& o) {
  if (j.is_array()) {
    o.mode = OpeningSelection::Mode::Explicit;
    o.cells = j.get<std::vector<std::string>>();
    return;
  }
  const auto s = j.get<std::string>();
  if (s == "canonical") o.mode = OpeningSelection::Mode::Canonical;
  else if (s == "all") o.mode = OpeningSelection::Mode::All;
  else throw ConfigError("openings must be \"canonical\", \"all\" or a list of cells");
  o.cells.clear();
}

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  std::vector<std::string> rules;
  for (auto r : c.rules) rules.emplace_back(to_string(r));
  j = nlohmann::json{{"game", to_string(c.game)},
                     {"size", c.size},
                     {"pool", c.pool},
                     {"openings", c.openings},
                     {"games_per_cell", c.games_per_cell},
                     {"master_seed", c.master_seed},
                     {"rules", rules},
                     {"output", c.output},
                     {"bootstrap_resamples", c.bootstrap_resamples}};
}

/// Missing keys keep the defaults of `c`, so a file can be partial.
inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  if (j.contains("game")) c.game = parse_game(j.at("game").get<std::string>());
  if (j.contains("size")) c.size = j.at("size").get<int>();
  if (j.contains("pool")) c.pool = j.at("pool").get<std::vector<PlayerSpec>>();
  if (j.contains("openings")) c.openings = j.at("openings").get<OpeningSelection>();
  if (j.contains("games_per_cell")) c.games_per_cell = j.at("games_per_cell").get<int>();
  if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("rules")) {
    c.rules.clear();
    for (const auto& r : j.at("rules")) c.rules.push_back(parse_rule(r.get<std::string>()));
  }
  if (j.contains("output")) c.output = j.at("output").get<std::string>();
  if (j.contains("bootstrap_resamples")) c.bootstrap_resamples = j.at("bootstrap_resamples").get<int>();
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Hash of everything that determines the match records. Rules, output and
/// bootstrap settings are left out so rational and free runs share a log.
inline std::string config_hash(const ExperimentConfig& c) {
  const nlohmann::json j{{"game", to_string(c.game)},         {"size", c.size},
                         {"pool", c.pool},                    {"openings", c.openings},
                         {"games_per_cell", c.games_per_cell}, {"master_seed", c.master_seed}};
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  return buf;
}

struct ResolvedOpening {
  std::string id;
  Move move;
};

inline std::vector<ResolvedOpening> resolve_openings(const ExperimentConfig& c) {
  return visit_game(c.game, [&]<class S>(std::type_identity<S>) {
    const S s = S::initial(c.size);
    std::vector<ResolvedOpening> out;
    switch (c.openings.mode) {
      case OpeningSelection::Mode::Canonical:
        for (const Move m : canonical_openings(c.game, c.size)) out.push_back({s.cell_name(m.cell), m});
        break;
      case OpeningSelection::Mode::All:
        for (const Move m : s.legal_moves()) out.push_back({s.cell_name(m.cell), m});
        break;
      case OpeningSelection::Mode::Explicit:
        for (const auto& name : c.openings.cells) {
          const int cell = s.parse_cell(name);
          if (!s.legal_mask().test(cell)) throw ConfigError("opening '" + name + "' is not legal");
          out.push_back({s.cell_name(cell), Move{cell}});
        }
        break;
    }
    if (out.empty()) throw ConfigError("no legal openings for this board");
    return out;
  });
}

/// Pool indices ordered weakest to strongest: random agents first, then by
/// simulation budget, then by label.
inline std::vector<std::size_t> ladder_order(const std::vector<PlayerSpec>& pool) {
  std::vector<std::size_t> order(pool.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto budget = [&](std::size_t i) { return pool[i].kind == AgentKind::Random ? 0 : pool[i].simulations; };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (budget(a) != budget(b)) return budget(a) < budget(b);
    return pool[a].label < pool[b].label;
  });
  return order;
}

struct PairPlan {
  std::size_t strong = 0;  // pool indices
  std::size_t weak = 0;
};

/// Adjacent pairs, weakest first; with three or more players the extreme
/// pair (strongest vs weakest) follows so the extremes form can be evaluated.
inline std::vector<PairPlan> plan_pairs(const std::vector<std::size_t>& order) {
  std::vector<PairPlan> pairs;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) pairs.push_back({order[k + 1], order[k]});
  if (order.size() >= 3) pairs.push_back({order.back(), order.front()});
  return pairs;
}

inline std::uint64_t pair_seed(std::uint64_t master, int pair) {
  return derive_seed(master, static_cast<std::uint64_t>(pair));
}

inline std::uint64_t cell_seed(std::uint64_t pair_seed_value, const CellKey& key) {
  return derive_seed(pair_seed_value, static_cast<std::uint64_t>(key.opening + 1), key.strong_black ? 1u : 0u,
                     static_cast<std::uint64_t>(key.index));
}

template <GameState S>
MatchRecord play_cell(int size, const PlayerSpec& strong, const PlayerSpec& weak,
                      const std::optional<ResolvedOpening>& opening, const CellKey& key,
                      std::uint64_t pair_seed_value) {
  const PlayerSpec& black = key.strong_black ? strong : weak;
  const PlayerSpec& white = key.strong_black ? weak : strong;
  MatchRecord r = play_match<S>(size, black, white, opening ? std::optional<Move>(opening->move) : std::nullopt,
                                cell_seed(pair_seed_value, key));
  r.strong = strong.label;
  r.weak = weak.label;
  r.cell = key;
  return r;
}

/// Winrate table for one pair from its records. slot -1 is the free opening.
inline WinrateTable table_from_records(const std::vector<MatchRecord>& records, int pair,
                                       const std::vector<std::pair<int, std::string>>& slots,
                                       const std::string& strong, const std::string& weak) {
  WinrateTable t{strong, weak, {}};
  std::map<int, std::size_t> where;
  for (const auto& [slot, id] : slots) {
    where[slot] = t.openings.size();
    t.openings.push_back({id, 0.0, 0.0, 0, 0});
  }
  std::vector<std::uint64_t> wins_p(slots.size(), 0), wins_q(slots.size(), 0);
  for (const auto& r : records) {
    if (!r.cell || r.cell->pair != pair) continue;
    const auto it = where.find(r.cell->opening);
    if (it == where.end()) continue;
    auto& o = t.openings[it->second];
    if (r.cell->strong_black) {
      ++o.n_p;
      wins_p[it->second] += r.strong_won() ? 1 : 0;
    } else {
      ++o.n_q;
      wins_q[it->second] += r.strong_won() ? 1 : 0;
    }
  }
  for (std::size_t i = 0; i < t.openings.size(); ++i) {
    auto& o = t.openings[i];
    if (o.n_p == 0 || o.n_q == 0) throw UsageError("no records for opening '" + o.id + "' of pair " + strong + " vs " + weak);
    o.p = static_cast<double>(wins_p[i]) / static_cast<double>(o.n_p);
    o.q = static_cast<double>(wins_q[i]) / static_cast<double>(o.n_q);
  }
  return t;
}

struct EstimatedTable {
  WinrateTable table;
  std::vector<MatchRecord> records;
};

/// g games per (opening, color) between two specs; p is the stronger spec's
/// rate as Black, q as White. Cells are seeded from `seed` as pair 0.
template <GameState S>
EstimatedTable estimate_table(int size, const PlayerSpec& strong, const PlayerSpec& weak,
                              const std::vector<ResolvedOpening>& openings, int g, std::uint64_t seed,
                              int threads = 1) {
  if (g < 1) throw ConfigError("games per cell must be >= 1");
  if (openings.empty()) throw ConfigError("no openings");
  std::vector<CellKey> keys;
  for (std::size_t i = 0; i < openings.size(); ++i)
    for (bool sb : {true, false})
      for (int k = 0; k < g; ++k) keys.push_back({0, static_cast<int>(i), sb, k});
  EstimatedTable out;
  out.records.resize(keys.size());
  parallel_for(keys.size(), threads, [&](std::size_t n) {
    out.records[n] = play_cell<S>(size, strong, weak, openings[static_cast<std::size_t>(keys[n].opening)], keys[n], seed);
  });
  std::vector<std::pair<int, std::string>> slots;
  for (std::size_t i = 0; i < openings.size(); ++i) slots.emplace_back(static_cast<int>(i), openings[i].id);
  out.table = table_from_records(out.records, 0, slots, strong.label, weak.label);
  return out;
}

/// Tables behind one report. The extreme tables are present only for pools of
/// three or more; for two players the single adjacent table is also the
/// extreme pair.
struct TableSet {
  std::vector<WinrateTable> adjacent;
  std::optional<WinrateTable> extremes;
  std::vector<WinrateTable> free_adjacent;
  std::optional<WinrateTable> free_extremes;

  const WinrateTable* extreme_table() const {
    if (extremes) return &*extremes;
    return adjacent.size() == 1 ? &adjacent.front() : nullptr;
  }
  const WinrateTable* free_extreme_table() const {
    if (free_extremes) return &*free_extremes;
    return free_adjacent.size() == 1 ? &free_adjacent.front() : nullptr;
  }
};

struct RuleRow {
  std::string rule;  // RDR, RDR+PR, GFM-max, GFM-min, FREE
  double plc_eq1 = 0.0;
  std::optional<double> plc_eq2;
  double depth_frac = 0.0;
  int depth_int = 1;
  std::optional<double> depth_eq2_frac;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<double> gaps;  // per adjacent pair, weakest first
  std::vector<double> w;     // stronger player's rate per adjacent pair
  std::optional<std::string> opening;
};

namespace detail {

inline std::optional<double> eq2(const WinrateTable* t, FirstMoveRule rule, std::size_t gfm_index) {
  if (!t) return std::nullopt;
  return outcome_gap(evaluate_rule(*t, rule, gfm_index));
}

inline RuleRow make_row(std::string name, const std::vector<WinrateTable>& pool, const WinrateTable* extreme,
                        FirstMoveRule rule, std::size_t gfm_index = 0) {
  RuleRow row;
  row.rule = std::move(name);
  for (const auto& t : pool) {
    const RuleOutcome o = evaluate_rule(t, rule, gfm_index);
    row.w.push_back(o.w);
    row.gaps.push_back(outcome_gap(o));
    row.plc_eq1 += row.gaps.back();
  }
  row.plc_eq2 = eq2(extreme, rule, gfm_index);
  const auto d = depth_from_plc(std::max(0.0, row.plc_eq1));
  row.depth_frac = d.fractional;
  row.depth_int = d.integer;
  if (row.plc_eq2) row.depth_eq2_frac = depth_from_plc(std::max(0.0, *row.plc_eq2)).fractional;
  return row;
}

}  // namespace detail

/// Point estimates for every requested rule, in the fixed order RDR, RDR+PR,
/// GFM-max, GFM-min, FREE.
inline std::vector<RuleRow> evaluate_rules(const TableSet& ts, const std::vector<ExperimentRule>& rules) {
  auto wants = [&](ExperimentRule r) { return std::find(rules.begin(), rules.end(), r) != rules.end(); };
  std::vector<RuleRow> rows;
  if (wants(ExperimentRule::Rdr))
    rows.push_back(detail::make_row("RDR", ts.adjacent, ts.extreme_table(), FirstMoveRule::Rdr));
  if (wants(ExperimentRule::RdrPr))
    rows.push_back(detail::make_row("RDR+PR", ts.adjacent, ts.extreme_table(), FirstMoveRule::RdrPr));
  if (wants(ExperimentRule::RdrGfm)) {
    const GfmProfile prof = gfm_profile(ts.adjacent);
    for (auto [name, idx] : {std::pair{"GFM-max", prof.best}, std::pair{"GFM-min", prof.worst}}) {
      RuleRow row = detail::make_row(name, ts.adjacent, ts.extreme_table(), FirstMoveRule::RdrGfm, idx);
      row.opening = ts.adjacent.front().openings[idx].id;
      rows.push_back(std::move(row));
    }
  }
  if (wants(ExperimentRule::Free)) {
    if (ts.free_adjacent.empty()) throw UsageError("FREE requested without free-opening tables");
    rows.push_back(detail::make_row("FREE", ts.free_adjacent, ts.free_extreme_table(), FirstMoveRule::RdrGfm, 0));
  }
  return rows;
}

namespace detail {

inline std::vector<WinrateTable*> all_tables(TableSet& ts) {
  std::vector<WinrateTable*> out;
  for (auto& t : ts.adjacent) out.push_back(&t);
  if (ts.extremes) out.push_back(&*ts.extremes);
  for (auto& t : ts.free_adjacent) out.push_back(&t);
  if (ts.free_extremes) out.push_back(&*ts.free_extremes);
  return out;
}

}  // namespace detail

/// Rows with 95% percentile intervals on plc_eq1 from per-cell binomial
/// resampling. Exact (count 0) cells stay fixed.
inline std::vector<RuleRow> analyze_tables(const TableSet& ts, const std::vector<ExperimentRule>& rules,
                                           int resamples, std::uint64_t seed) {
  std::vector<RuleRow> rows = evaluate_rules(ts, rules);
  TableSet work = ts;
  std::vector<BinomialCell> cells;
  for (WinrateTable* t : detail::all_tables(work))
    for (const auto& o : t->openings) {
      cells.push_back({o.p, o.n_p});
      cells.push_back({o.q, o.n_q});
    }
  const auto intervals = bootstrap_intervals(
      cells,
      [&](std::span<const BinomialCell> c) {
        std::size_t k = 0;
        for (WinrateTable* t : detail::all_tables(work))
          for (auto& o : t->openings) {
            o.p = c[k++].p;
            o.q = c[k++].p;
          }
        std::vector<double> values;
        for (const auto& r : evaluate_rules(work, rules)) values.push_back(r.plc_eq1);
        return values;
      },
      resamples, seed);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].ci_low = intervals[i].low;
    rows[i].ci_high = intervals[i].high;
  }
  return rows;
}

struct PlcReport {
  GameId game = GameId::NoGo;
  int size = 0;
  std::string config_hash;
  std::vector<std::string> order;  // weakest to strongest
  std::vector<std::string> openings;
  TableSet tables;
  std::vector<RuleRow> rows;
  std::vector<double> gfm_per_opening;  // chain PLC with each shared opening
  std::optional<double> gfm_upper_envelope;
  std::uint64_t matches = 0;
  int games_per_cell = 0;
  bool low_count = false;
  double wall_seconds = 0.0;

  const RuleRow* row(std::string_view name) const {
    for (const auto& r : rows)
      if (r.rule == name) return &r;
    return nullptr;
  }
};

inline void to_json(nlohmann::json& j, const RuleRow& r) {
  j = nlohmann::json{{"rule", r.rule},     {"plc_eq1", r.plc_eq1},   {"depth_frac", r.depth_frac},
                     {"depth_int", r.depth_int}, {"ci", {r.ci_low, r.ci_high}}, {"gaps", r.gaps},
                     {"w", r.w}};
  j["plc_eq2"] = r.plc_eq2 ? nlohmann::json(*r.plc_eq2) : nlohmann::json(nullptr);
  j["depth_eq2_frac"] = r.depth_eq2_frac ? nlohmann::json(*r.depth_eq2_frac) : nlohmann::json(nullptr);
  if (r.opening) j["opening"] = *r.opening;
}

inline void to_json(nlohmann::json& j, const PlcReport& r) {
  nlohmann::json tables{{"adjacent", r.tables.adjacent}, {"free_adjacent", r.tables.free_adjacent}};
  if (r.tables.extremes) tables["extremes"] = *r.tables.extremes;
  if (r.tables.free_extremes) tables["free_extremes"] = *r.tables.free_extremes;
  j = nlohmann::json{{"game", to_string(r.game)},
                     {"size", r.size},
                     {"config_hash", r.config_hash},
                     {"order", r.order},
                     {"openings", r.openings},
                     {"tables", tables},
                     {"rules", r.rows},
                     {"gfm_per_opening", r.gfm_per_opening},
                     {"matches", r.matches},
                     {"games_per_cell", r.games_per_cell},
                     {"low_count", r.low_count},
                     {"wall_seconds", r.wall_seconds}};
  if (r.gfm_upper_envelope) j["gfm_upper_envelope"] = *r.gfm_upper_envelope;
}

namespace detail {

inline std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v == 0.0 ? 0.0 : v);
  return buf;
}

}  // namespace detail

/// CSV summary; no timing data, so reruns are byte-identical.
inline std::string to_csv(const PlcReport& r) {
  std::string out = "rule,plc_eq1,plc_eq2,depth_frac,depth_int,ci_low,ci_high\n";
  for (const auto& row : r.rows) {
    out += row.rule + "," + detail::fixed(row.plc_eq1) + "," + (row.plc_eq2 ? detail::fixed(*row.plc_eq2) : "") +
           "," + detail::fixed(row.depth_frac) + "," + std::to_string(row.depth_int) + "," +
           detail::fixed(row.ci_low) + "," + detail::fixed(row.ci_high) + "\n";
  }
  return out;
}

/// One line in the layout of the NoGo/Y results table: game, size, then the
/// chain PLC for each available rule.
inline std::string table_row(const PlcReport& r) {
  std::ostringstream os;
  os << to_string(r.game) << " " << r.size << "x" << r.size;
  for (const char* name : {"RDR", "RDR+PR", "GFM-max", "GFM-min", "FREE"}) {
    os << " | " << name << " ";
    if (const RuleRow* row = r.row(name)) os << detail::fixed(row->plc_eq1, 2);
    else os << "-";
  }
  return os.str();
}

/// Work list for a config: every (pair, opening, color, index) cell, ordered
/// by key.
struct WorkItem {
  CellKey key;
  PairPlan players;
  std::optional<ResolvedOpening> opening;
};

inline std::vector<WorkItem> plan_work(const ExperimentConfig& c, bool rational, bool free) {
  const auto pairs = plan_pairs(ladder_order(c.pool));
  const auto openings = rational ? resolve_openings(c) : std::vector<ResolvedOpening>{};
  std::vector<WorkItem> items;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto add = [&](int slot, const std::optional<ResolvedOpening>& o) {
      for (bool sb : {true, false})
        for (int i = 0; i < c.games_per_cell; ++i) items.push_back({{static_cast<int>(k), slot, sb, i}, pairs[k], o});
    };
    if (free) add(-1, std::nullopt);
    for (std::size_t i = 0; i < openings.size(); ++i) add(static_cast<int>(i), openings[i]);
  }
  std::sort(items.begin(), items.end(), [](const WorkItem& a, const WorkItem& b) { return a.key < b.key; });
  return items;
}

/// Builds the report from stored records alone. Every cell the rules need
/// must be present with exactly games_per_cell games.
inline PlcReport build_report(const ExperimentConfig& c, const std::vector<MatchRecord>& records) {
  c.validate();
  PlcReport rep;
  rep.game = c.game;
  rep.size = c.size;
  rep.config_hash = config_hash(c);
  rep.games_per_cell = c.games_per_cell;
  const auto order = ladder_order(c.pool);
  for (auto i : order) rep.order.push_back(c.pool[i].label);
  const auto pairs = plan_pairs(order);
  const bool rational = c.wants_rational();
  const bool free = c.wants(ExperimentRule::Free);

  std::vector<std::pair<int, std::string>> rational_slots;
  if (rational) {
    const auto openings = resolve_openings(c);
    for (std::size_t i = 0; i < openings.size(); ++i) {
      rational_slots.emplace_back(static_cast<int>(i), openings[i].id);
      rep.openings.push_back(openings[i].id);
    }
  }
  const std::vector<std::pair<int, std::string>> free_slots{{-1, "free"}};
  const std::size_t n_adjacent = c.pool.size() - 1;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& strong = c.pool[pairs[k].strong].label;
    const auto& weak = c.pool[pairs[k].weak].label;
    const int pair = static_cast<int>(k);
    if (rational) {
      auto t = table_from_records(records, pair, rational_slots, strong, weak);
      (k < n_adjacent ? rep.tables.adjacent.emplace_back(std::move(t)) : rep.tables.extremes.emplace(std::move(t)));
    }
    if (free) {
      auto t = table_from_records(records, pair, free_slots, strong, weak);
      (k < n_adjacent ? rep.tables.free_adjacent.emplace_back(std::move(t))
                      : rep.tables.free_extremes.emplace(std::move(t)));
    }
  }
  const auto g = static_cast<std::uint64_t>(c.games_per_cell);
  TableSet& ts = rep.tables;
  for (WinrateTable* t : detail::all_tables(ts)) {
    for (const auto& o : t->openings) {
      if (o.n_p != g || o.n_q != g)
        throw UsageError("cell count mismatch for " + t->strong + " vs " + t->weak + " opening " + o.id);
      rep.matches += o.n_p + o.n_q;
    }
    rep.low_count = rep.low_count || t->low_count();
  }
  rep.rows = analyze_tables(ts, c.rules, c.bootstrap_resamples, derive_seed(c.master_seed, 0xB0075u));
  if (c.wants(ExperimentRule::RdrGfm)) {
    const GfmProfile prof = gfm_profile(ts.adjacent);
    for (const auto& po : prof.per_opening) rep.gfm_per_opening.push_back(po.plc);
    rep.gfm_upper_envelope = prof.upper_envelope;
  }
  return rep;
}

struct OutputPaths {
  std::string log;
  std::string report;
  std::string csv;
};

/// `<prefix>.matches.jsonl`, `<prefix><variant>.report.json`, `<prefix><variant>.csv`.
inline OutputPaths output_paths(const std::string& prefix, std::string_view variant = "") {
  return {prefix + ".matches.jsonl", prefix + std::string(variant) + ".report.json",
          prefix + std::string(variant) + ".csv"};
}

/// Reads a match log. A final line without a newline is an interrupted write
/// and is dropped; any other unreadable line, a foreign config hash or two
/// different records for one cell raise CorruptLog.
inline std::vector<MatchRecord> load_log(const std::string& path, const std::string& expected_hash = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<MatchRecord> out;
  std::map<CellKey, std::size_t> seen;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < data.size()) {
    const std::size_t nl = data.find('\n', pos);
    if (nl == std::string::npos) break;
    ++line_no;
    const std::string line = data.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    MatchRecord r;
    try {
      r = from_json_line(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      throw CorruptLog(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!expected_hash.empty() && r.config_hash != expected_hash)
      throw CorruptLog(path + ":" + std::to_string(line_no) + ": record belongs to config " + r.config_hash +
                       ", expected " + expected_hash);
    if (r.cell) {
      const auto [it, inserted] = seen.emplace(*r.cell, out.size());
      if (!inserted) {
        if (!(out[it->second] == r)) throw CorruptLog(path + ":" + std::to_string(line_no) + ": conflicting duplicate cell");
        continue;
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline void append_log(const std::string& path, const std::vector<MatchRecord>& records) {
  if (records.empty()) return;
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (const auto& r : records) out << to_json_line(r).dump() << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

/// Rewrites a log so that it ends after its last complete line.
inline void truncate_partial_line(const std::string& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec || size == 0) return;
  std::ifstream in(path, std::ios::binary);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  if (data.back() == '\n') return;
  const auto nl = data.rfind('\n');
  std::filesystem::resize_file(path, nl == std::string::npos ? 0 : nl + 1);
}

struct RunOptions {
  int threads = 1;
  std::size_t batch = 256;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

namespace detail {

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
}

inline PlcReport run_cells(const ExperimentConfig& c, const RunOptions& opts, bool rational, bool free,
                           std::string_view variant) {
  c.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::string hash = config_hash(c);
  const auto paths = output_paths(c.output, variant);
  std::vector<MatchRecord> records;
  if (!c.output.empty()) {
    records = load_log(paths.log, hash);
    truncate_partial_line(paths.log);
  }
  std::set<CellKey> done;
  for (const auto& r : records)
    if (r.cell) done.insert(*r.cell);

  std::vector<WorkItem> pending;
  for (auto& w : plan_work(c, rational, free))
    if (!done.contains(w.key)) pending.push_back(std::move(w));

  const std::size_t total = pending.size();
  const std::size_t batch = std::max<std::size_t>(1, opts.batch);
  visit_game(c.game, [&]<class S>(std::type_identity<S>) {
    for (std::size_t begin = 0; begin < total; begin += batch) {
      const std::size_t end = std::min(total, begin + batch);
      std::vector<MatchRecord> out(end - begin);
      parallel_for(out.size(), opts.threads, [&](std::size_t n) {
        const WorkItem& w = pending[begin + n];
        out[n] = play_cell<S>(c.size, c.pool[w.players.strong], c.pool[w.players.weak], w.opening, w.key,
                              pair_seed(c.master_seed, w.key.pair));
        out[n].config_hash = hash;
      });
      if (!c.output.empty()) append_log(paths.log, out);
      for (auto& r : out) records.push_back(std::move(r));
      if (opts.progress) opts.progress(end, total);
    }
  });

  ExperimentConfig view = c;
  if (!rational) view.rules = {ExperimentRule::Free};
  if (!free) std::erase(view.rules, ExperimentRule::Free);
  PlcReport rep = build_report(view, records);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!c.output.empty()) {
    write_text(paths.report, nlohmann::json(rep).dump(2) + "\n");
    write_text(paths.csv, to_csv(rep));
  }
  return rep;
}

}  // namespace detail

/// Estimates every table the requested rules need, evaluates them and, when
/// an output prefix is set, persists the log, report and CSV. Cells already in
/// the log are reused, so an interrupted run resumes where it stopped.
inline PlcReport run_experiment(const ExperimentConfig& c, const RunOptions& opts = {}) {
  return detail::run_cells(c, opts, c.wants_rational(), c.wants(ExperimentRule::Free), "");
}

/// Matches where Black's agent picks move 1 itself; chain PLC over adjacent
/// pairs with g games per color assignment.
inline PlcReport free_opening_plc(const ExperimentConfig& c, const RunOptions& opts = {}) {
  return detail::run_cells(c, opts, false, true, ".free");
}

}  // namespace depthlab
