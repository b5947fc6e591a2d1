#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "depthlab/depthlab.hpp"

using namespace depthlab;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;
constexpr int kCorrupt = 3;

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---- analyze-table --------------------------------------------------------

struct TableInput {
  std::vector<WinrateTable> pool;  // adjacent pairs, weakest first
  std::optional<WinrateTable> extremes;
};

TableInput load_tables(const std::string& fixture, const std::string& file) {
  TableInput in;
  if (!fixture.empty()) {
    in.pool = fixtures::by_name(fixture);
    return in;
  }
  const json j = read_json_file(file);
  try {
    if (j.is_array()) {
      in.pool = j.get<std::vector<WinrateTable>>();
    } else if (j.contains("pool")) {
      in.pool = j.at("pool").get<std::vector<WinrateTable>>();
      if (j.contains("extremes")) in.extremes = j.at("extremes").get<WinrateTable>();
    } else {
      in.pool = {j.get<WinrateTable>()};
    }
  } catch (const json::exception& e) {
    throw ConfigError(file + ": expected a table {\"pair\":[..],\"openings\":[..]}, a list of tables or "
                      "{\"pool\":[..]}: " + e.what());
  }
  if (in.pool.empty()) throw ConfigError(file + ": no tables");
  return in;
}

int analyze_table(const std::string& fixture, const std::string& file, std::vector<std::string> rules) {
  const TableInput in = load_tables(fixture, file);
  if (rules.empty() || std::find(rules.begin(), rules.end(), "all") != rules.end()) rules = {"rdr", "pr", "gfm"};
  std::vector<ExperimentRule> parsed;
  for (const auto& r : rules) {
    const auto rule = parse_rule(r);
    if (rule == ExperimentRule::Free) throw ConfigError("FREE needs match records; use free-opening");
    parsed.push_back(rule);
  }

  for (const auto& t : in.pool) {
    std::cout << "pair " << t.strong << " vs " << t.weak << "\n";
    std::cout << "  opening         p        q    w_gfm\n";
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto& o = t.openings[i];
      std::printf("  %-8s %8.4f %8.4f %8.4f\n", o.id.c_str(), o.p, o.q, w_gfm(t, i).w);
    }
    const auto rdr = w_rdr(t);
    const auto pr = w_pr(t);
    std::cout << "  w_rdr " << fmt(rdr.w, 6) << " (opening " << *rdr.opening_id << ")\n";
    std::cout << "  w_pr  " << fmt(pr.w, 6) << " (stronger opens " << *pr.opening_id
              << (*pr.swap ? ", swapped" : ", kept") << "; weaker opens " << pr.weaker_moves->id << ")\n";
  }

  TableSet ts;
  ts.adjacent = in.pool;
  ts.extremes = in.extremes;
  const auto rows = analyze_tables(ts, parsed, 100, 0);
  std::cout << "\nrule        gaps (weakest pair first)          PLC eq1    PLC eq2   depth\n";
  for (const auto& r : rows) {
    std::string gaps;
    for (double g : r.gaps) gaps += (gaps.empty() ? "" : " + ") + fmt(g, 3);
    std::printf("%-10s  %-32s %9.3f  %9s  %.2f (%d)\n", r.rule.c_str(), gaps.c_str(), r.plc_eq1,
                r.plc_eq2 ? fmt(*r.plc_eq2, 3).c_str() : "-", r.depth_frac, r.depth_int);
  }
  if (in.pool.size() > 1) {
    const auto prof = gfm_profile(in.pool);
    std::cout << "GFM per opening:";
    for (std::size_t i = 0; i < prof.per_opening.size(); ++i)
      std::cout << " " << in.pool.front().openings[i].id << "=" << fmt(prof.per_opening[i].plc, 3);
    std::cout << "  upper envelope " << fmt(prof.upper_envelope, 3) << "\n";
  }
  return kOk;
}

// ---- verify ---------------------------------------------------------------

int report_verify(const std::string& suite, const VerifyResult& r) {
  std::cout << suite << ": " << (r.pass ? "pass" : "FAIL") << " (" << r.checked << " checks)\n";
  if (!r.pass) std::cout << "counterexample:\n" << r.counterexample << "\n";
  return r.pass ? kOk : kViolation;
}

struct CommonFlags {
  std::string game = "nogo";
  int size = 5;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

std::uint64_t need_seed(const CommonFlags& f, const std::string& what) {
  if (!f.seed) throw ConfigError(what + " is stochastic: --seed is required");
  return *f.seed;
}

int verify(const std::string& suite, std::uint64_t n, const CommonFlags& f, const std::string& log) {
  if (n < 1) throw ConfigError("-n must be >= 1");
  if (suite == "theorem1") return report_verify(suite, verify_theorem1_random(n, need_seed(f, suite)));
  const GameId game = parse_game(f.game);
  if (suite == "symmetry")
    return visit_game(game, [&]<class S>(std::type_identity<S>) {
      return report_verify(suite, verify_symmetry<S>(f.size, n, need_seed(f, suite)));
    });
  if (suite == "nodraws")
    return visit_game(game, [&]<class S>(std::type_identity<S>) {
      const bool exhaustive = S::initial(f.size).cell_count() <= 6;
      return report_verify(suite + (exhaustive ? " (exhaustive)" : " (random playouts)"),
                           verify_nodraws<S>(f.size, n, exhaustive ? 0 : need_seed(f, suite)));
    });
  if (suite == "replay") {
    if (log.empty()) throw ConfigError("replay needs --log");
    if (!std::ifstream(log)) throw ConfigError("cannot read " + log);
    return report_verify(suite, verify_replay_log(log));
  }
  throw ConfigError("unknown suite '" + suite + "' (theorem1, symmetry, nodraws, replay)");
}

// ---- tournament / free-opening ---------------------------------------------

struct ExperimentFlags {
  std::string config;
  std::vector<std::string> pool;
  std::optional<int> pool_size;
  std::optional<int> games_per_cell;
  std::vector<std::string> rules;
  std::string openings;
  std::string out;
  bool quiet = false;
};

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ','))
      if (!part.empty()) out.push_back(part);
  }
  return out;
}

ExperimentConfig make_config(const CommonFlags& f, const ExperimentFlags& e, bool game_given, bool size_given) {
  ExperimentConfig c;
  c.pool = ladder(4, LadderStep::geometric(125, 2));
  c.output = "depthlab_run";
  bool seed_from_file = false;
  if (!e.config.empty()) {
    const json j = read_json_file(e.config);
    try {
      from_json(j, c);
    } catch (const json::exception& ex) {
      throw ConfigError(e.config + ": " + ex.what());
    }
    seed_from_file = j.contains("master_seed");
  }
  if (game_given || e.config.empty()) c.game = parse_game(f.game);
  if (size_given || e.config.empty()) c.size = f.size;
  if (!e.pool.empty()) {
    c.pool.clear();
    for (const auto& b : split_list(e.pool)) {
      if (b == "random") {
        c.pool.push_back(random_player());
        continue;
      }
      int sims = 0;
      try {
        std::size_t used = 0;
        sims = std::stoi(b, &used);
        if (used != b.size()) throw std::invalid_argument(b);
      } catch (const std::exception&) {
        throw ConfigError("--pool expects simulation budgets, got '" + b + "'");
      }
      c.pool.push_back(mcts_player(sims));
    }
  }
  if (e.pool_size) {
    if (*e.pool_size < 2) throw ConfigError("--pool-size must be >= 2");
    if (e.pool.empty()) c.pool = ladder(*e.pool_size, LadderStep::geometric(125, 2));
    else if (static_cast<int>(c.pool.size()) != *e.pool_size) throw ConfigError("--pool-size disagrees with --pool");
  }
  if (e.games_per_cell) c.games_per_cell = *e.games_per_cell;
  if (!e.rules.empty()) {
    c.rules.clear();
    for (const auto& r : split_list(e.rules)) c.rules.push_back(parse_rule(r));
  }
  if (!e.openings.empty()) {
    if (e.openings == "canonical") c.openings = {};
    else if (e.openings == "all") c.openings = {OpeningSelection::Mode::All, {}};
    else c.openings = {OpeningSelection::Mode::Explicit, split_list({e.openings})};
  }
  if (!e.out.empty()) c.output = e.out;
  if (f.seed) c.master_seed = *f.seed;
  else if (!seed_from_file) throw ConfigError("tournaments are stochastic: give --seed or master_seed in the config");
  c.validate();
  return c;
}

int run_tournament(const CommonFlags& f, const ExperimentFlags& e, bool game_given, bool size_given, bool free_only) {
  const ExperimentConfig c = make_config(f, e, game_given, size_given);
  RunOptions opts;
  opts.threads = resolve_threads(f.threads);
  if (!e.quiet) {
    opts.progress = [](std::size_t done, std::size_t total) {
      std::cerr << "\r" << done << "/" << total << " matches" << std::flush;
      if (done == total) std::cerr << "\n";
    };
  }
  const PlcReport rep = free_only ? free_opening_plc(c, opts) : run_experiment(c, opts);
  const auto paths = output_paths(c.output, free_only ? ".free" : "");
  std::cout << to_csv(rep);
  std::cout << table_row(rep) << "\n";
  if (rep.low_count) std::cout << "warning: some cells hold fewer than 30 games\n";
  std::cout << "matches " << rep.matches << ", config " << rep.config_hash << "\n";
  std::cout << "wrote " << paths.report << ", " << paths.csv << ", " << paths.log << "\n";
  return kOk;
}

// ---- depth / openings / fixtures -------------------------------------------

int depth_command(const std::string& file, const std::vector<double>& ratings, double threshold) {
  WinMatrix m;
  if (!file.empty()) {
    try {
      m = read_json_file(file).get<WinMatrix>();
    } catch (const json::exception& e) {
      throw ConfigError(file + ": expected {\"labels\":[..],\"p\":[[..]],\"counts\":[[..]]}: " + e.what());
    }
  } else if (!ratings.empty()) {
    m = WinMatrix::from_ratings(ratings);
  } else {
    throw ConfigError("depth needs --file or --ratings");
  }
  const DepthReport r = depth_report(m, threshold);
  std::cout << json(r).dump(2) << "\n";
  std::cout << "PLC eq1 " << fmt(r.plc_chain, 3) << ", eq2 " << fmt(r.plc_extremes, 3) << ", depth "
            << fmt(r.depth_fractional, 2) << " (" << r.depth_integer << "), chain length " << r.chain_length << "\n";
  return kOk;
}

int openings_command(const CommonFlags& f) {
  const GameId game = parse_game(f.game);
  return visit_game(game, [&]<class S>(std::type_identity<S>) {
    const S s = S::initial(f.size);
    const auto moves = canonical_openings(game, f.size);
    std::cout << to_string(game) << " " << f.size << ": " << moves.size() << " openings\n";
    for (const Move m : moves) std::cout << "  " << s.cell_name(m.cell) << "\n";
    std::cout << s.diagram();
    return kOk;
  });
}

int fixtures_command(const std::string& name) {
  if (name.empty()) {
    for (const auto& n : fixtures::names()) std::cout << n << "\n";
    return kOk;
  }
  const auto pool = fixtures::by_name(name);
  std::cout << (pool.size() == 1 ? json(pool.front()) : json{{"pool", pool}}).dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Game depth and first-move rule laboratory"};
  app.require_subcommand(1);

  CommonFlags common;
  auto add_game_flags = [&](CLI::App* cmd) {
    auto* g = cmd->add_option("--game", common.game, "nogo or y")->check(CLI::IsMember({"nogo", "y"}));
    auto* s = cmd->add_option("--size", common.size, "board side length");
    return std::pair{g, s};
  };
  auto add_seed = [&](CLI::App* cmd) { cmd->add_option("--seed", common.seed, "master seed"); };

  // analyze-table
  std::string fixture, file;
  std::vector<std::string> rules;
  auto* analyze = app.add_subcommand("analyze-table", "exact rule analysis of a winrate table or pool");
  auto* fixture_opt = analyze->add_option("--fixture", fixture, "built-in table: table3a, table3b, table3c");
  auto* file_opt = analyze->add_option("--file", file, "table or pool JSON");
  fixture_opt->excludes(file_opt);
  analyze->add_option("--rule,--rules", rules, "rdr, pr, gfm or all (repeatable)");

  // verify
  std::string suite, log;
  std::uint64_t n = 1000;
  auto* verify_cmd = app.add_subcommand("verify", "run a property suite");
  verify_cmd->add_option("suite", suite, "theorem1, symmetry, nodraws or replay")->required();
  verify_cmd->add_option("-n", n, "number of random cases");
  verify_cmd->add_option("--log", log, "match log for replay");
  add_game_flags(verify_cmd);
  add_seed(verify_cmd);

  // tournament / free-opening
  ExperimentFlags exp;
  std::pair<CLI::Option*, CLI::Option*> tour_opts, free_opts;
  auto add_experiment = [&](CLI::App* cmd) {
    cmd->add_option("--config", exp.config, "experiment config JSON");
    cmd->add_option("--pool", exp.pool, "simulation budgets, e.g. 125,250,500 (\"random\" allowed)");
    cmd->add_option("--pool-size", exp.pool_size, "ladder length (125 * 2^i budgets when --pool is absent)");
    cmd->add_option("--games-per-cell", exp.games_per_cell, "games per (pair, opening, color)");
    cmd->add_option("--rules", exp.rules, "RDR, RDR+PR, RDR+GFM, FREE (comma separated)");
    cmd->add_option("--openings", exp.openings, "canonical, all, or a comma-separated cell list");
    cmd->add_option("--out", exp.out, "output path prefix");
    cmd->add_option("--threads", common.threads, "worker threads (default $DEPTHLAB_THREADS or all cores)");
    cmd->add_flag("--quiet", exp.quiet, "no progress output");
    add_seed(cmd);
    return add_game_flags(cmd);
  };
  auto* tournament = app.add_subcommand("tournament", "estimate tables for a ladder and report PLC per rule");
  tour_opts = add_experiment(tournament);
  auto* free_cmd = app.add_subcommand("free-opening", "PLC when Black's agent chooses the first move");
  free_opts = add_experiment(free_cmd);

  // depth
  std::vector<double> ratings;
  double threshold = 0.6;
  auto* depth = app.add_subcommand("depth", "PLC and 60% chain depth of a win matrix");
  depth->add_option("--file", file, "WinMatrix JSON");
  depth->add_option("--ratings", ratings, "build an exact Elo matrix from ratings")->delimiter(',');
  depth->add_option("--threshold", threshold, "chain threshold")->check(CLI::Range(0.5, 1.0));

  // openings
  auto* openings = app.add_subcommand("openings", "canonical opening moves");
  add_game_flags(openings);

  // fixtures
  std::string fixture_name;
  auto* fixtures_cmd = app.add_subcommand("fixtures", "list or print built-in tables");
  fixtures_cmd->add_option("name", fixture_name, "fixture to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (analyze->parsed()) {
      if (fixture.empty() && file.empty()) throw ConfigError("analyze-table needs --fixture or --file");
      return analyze_table(fixture, file, rules);
    }
    if (verify_cmd->parsed()) return verify(suite, n, common, log);
    if (tournament->parsed())
      return run_tournament(common, exp, tour_opts.first->count() > 0, tour_opts.second->count() > 0, false);
    if (free_cmd->parsed())
      return run_tournament(common, exp, free_opts.first->count() > 0, free_opts.second->count() > 0, true);
    if (depth->parsed()) return depth_command(file, ratings, threshold);
    if (openings->parsed()) return openings_command(common);
    if (fixtures_cmd->parsed()) return fixtures_command(fixture_name);
  } catch (const CorruptLog& e) {
    std::cerr << "error: corrupted match log: " << e.what() << "\n";
    return kCorrupt;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCorrupt;
  }
  return kUsage;
}
