#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "depthlab/experiment.hpp"
#include "depthlab/fixtures.hpp"
#include "depthlab/verify.hpp"

using namespace depthlab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("depthlab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PlayerSpec labeled(PlayerSpec s, std::string label) {
  s.label = std::move(label);
  return s;
}

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.game = GameId::NoGo;
  c.size = 4;
  c.pool = {mcts_player(4), mcts_player(16), mcts_player(64)};
  c.games_per_cell = 3;
  c.master_seed = 17;
  c.rules = {ExperimentRule::Rdr, ExperimentRule::RdrPr, ExperimentRule::RdrGfm, ExperimentRule::Free};
  c.bootstrap_resamples = 200;
  return c;
}

}  // namespace

TEST(PlayMatch, YSizeTwoBlackAlwaysWins) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto r = play_match<YState>(2, random_player(), random_player(), std::nullopt, seed);
    EXPECT_EQ(r.winner, Color::Black);
    EXPECT_TRUE(replay_matches(r));
  }
}

TEST(PlayMatch, NoGoOneByOneWhiteWinsWithoutMoves) {
  const auto r = play_match<NoGoState>(1, mcts_player(10), mcts_player(10), std::nullopt, 5);
  EXPECT_EQ(r.winner, Color::White);
  EXPECT_TRUE(r.moves.empty());
}

TEST(PlayMatch, DeterministicAndReplayable) {
  const auto a = play_match<NoGoState>(5, mcts_player(30), random_player(), Move{7}, 99);
  const auto b = play_match<NoGoState>(5, mcts_player(30), random_player(), Move{7}, 99);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.moves.front(), Move{7});
  EXPECT_EQ(a.opening, "c2");
  EXPECT_TRUE(replay_matches(a));
  auto tampered = a;
  tampered.winner = opponent(a.winner);
  EXPECT_FALSE(replay_matches(tampered));
  auto truncated = a;
  truncated.moves.pop_back();
  EXPECT_FALSE(replay_matches(truncated));
}

TEST(PlayMatch, IllegalOpeningIsConfigError) {
  EXPECT_THROW(play_match<NoGoState>(5, random_player(), random_player(), Move{25}, 1), ConfigError);
  EXPECT_THROW(play_match<NoGoState>(1, random_player(), random_player(), Move{0}, 1), ConfigError);
}

TEST(MatchLog, JsonLineRoundTrip) {
  auto r = play_match<YState>(4, mcts_player(8), random_player(), Move{4}, 3);
  r.cell = CellKey{2, 1, false, 7};
  r.config_hash = "abc";
  const auto j = to_json_line(r);
  for (const char* key : {"pair", "opening", "colors", "winner", "moves", "seed"}) EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(from_json_line(nlohmann::json::parse(j.dump())), r);
}

TEST(EstimateTable, SingleGameCellsAreLowCount) {
  const auto openings = resolve_openings(ExperimentConfig{});
  const auto est = estimate_table<NoGoState>(5, mcts_player(8), mcts_player(2), openings, 1, 4);
  ASSERT_EQ(est.table.size(), 6u);
  EXPECT_TRUE(est.table.low_count());
  for (const auto& o : est.table.openings) {
    EXPECT_TRUE(o.p == 0.0 || o.p == 1.0);
    EXPECT_TRUE(o.q == 0.0 || o.q == 1.0);
    EXPECT_EQ(o.n_p, 1u);
    EXPECT_EQ(o.n_q, 1u);
  }
  EXPECT_EQ(est.records.size(), 12u);
}

TEST(EstimateTable, SelfPlayIsColorBaselinePlusNoise) {
  // Identical specs: p_i estimates Black's rate and q_i White's, so
  // p_i + q_i = 1 up to binomial noise and every GFM rate is near 1/2.
  const auto openings = resolve_openings(ExperimentConfig{});
  const int g = 60;
  const auto est = estimate_table<NoGoState>(5, labeled(mcts_player(8), "a"), labeled(mcts_player(8), "b"),
                                             openings, g, 8);
  for (const auto& o : est.table.openings) {
    const double sd = std::sqrt(2 * 0.25 / g);
    EXPECT_LT(std::abs(o.p + o.q - 1.0), 2.576 * sd) << o.id;
  }
}

TEST(EstimateTable, StrongerBudgetWinsOnAverage) {
  const auto openings = resolve_openings(ExperimentConfig{});
  const auto est = estimate_table<NoGoState>(5, mcts_player(1000), mcts_player(125), openings, 8, 21);
  double mean = 0.0;
  for (const auto& o : est.table.openings) mean += (o.p + o.q) / 2.0;
  EXPECT_GE(mean / 6.0, 0.6);
}

TEST(EstimateTable, SymmetricOpeningsAgreeWithinNoise) {
  ExperimentConfig c;
  c.openings = {OpeningSelection::Mode::Explicit, {"b1", "a2"}};  // transposes of each other
  const auto openings = resolve_openings(c);
  const int g = 150;
  const auto est = estimate_table<NoGoState>(5, mcts_player(24), mcts_player(4), openings, g, 5);
  const auto& a = est.table.openings[0];
  const auto& b = est.table.openings[1];
  const double sd = std::sqrt(2 * 0.25 / g);
  EXPECT_LT(std::abs(a.p - b.p), 3 * sd);
  EXPECT_LT(std::abs(a.q - b.q), 3 * sd);
}

TEST(Config, ValidationAndJson) {
  auto c = small_config();
  EXPECT_NO_THROW(c.validate());
  const ExperimentConfig back = nlohmann::json(c).get<ExperimentConfig>();
  EXPECT_EQ(nlohmann::json(back), nlohmann::json(c));
  EXPECT_EQ(config_hash(back), config_hash(c));

  auto one = c;
  one.pool.resize(1);
  EXPECT_THROW(one.validate(), ConfigError);
  auto dup = c;
  dup.pool[1] = dup.pool[0];
  EXPECT_THROW(dup.validate(), ConfigError);
  auto zero = c;
  zero.games_per_cell = 0;
  EXPECT_THROW(zero.validate(), ConfigError);
  auto none = c;
  none.rules.clear();
  EXPECT_THROW(none.validate(), ConfigError);
  EXPECT_THROW(parse_rule("komi"), ConfigError);
  EXPECT_EQ(parse_rule("pr"), ExperimentRule::RdrPr);

  auto other = c;
  other.rules = {ExperimentRule::Free};
  other.output = "elsewhere";
  EXPECT_EQ(config_hash(other), config_hash(c));
  other.master_seed += 1;
  EXPECT_NE(config_hash(other), config_hash(c));
}

TEST(Seeds, DistinctAcrossCells) {
  auto c = small_config();
  c.games_per_cell = 20;
  const auto work = plan_work(c, true, true);
  std::set<std::uint64_t> seeds;
  for (const auto& w : work) seeds.insert(cell_seed(pair_seed(c.master_seed, w.key.pair), w.key));
  EXPECT_EQ(seeds.size(), work.size());
  // 3 pairs (two adjacent plus the extremes), 3 canonical 4x4 openings plus
  // the free slot, 2 colors, 20 games.
  EXPECT_EQ(work.size(), 3u * 4u * 2u * 20u);
}

TEST(Experiment, AnalyticTable3cGaps) {
  TableSet ts;
  ts.adjacent = fixtures::table3c();
  const auto rows = analyze_tables(ts, {ExperimentRule::Rdr, ExperimentRule::RdrPr, ExperimentRule::RdrGfm}, 200, 1);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[1].rule, "RDR+PR");
  EXPECT_NEAR(rows[1].gaps[1], 530.72, 0.05);
  EXPECT_NEAR(rows[1].gaps[0], 126.97, 0.05);
  EXPECT_GT(rows[1].plc_eq1, 657);
  EXPECT_EQ(rows[2].rule, "GFM-max");
  EXPECT_EQ(*rows[2].opening, "A");
  EXPECT_NEAR(rows[2].plc_eq1, 636.426 + 13.905, 0.05);
  EXPECT_EQ(rows[3].rule, "GFM-min");
  EXPECT_NEAR(rows[3].plc_eq1, 275.452 + 251.893, 0.05);
  for (const auto& r : rows) {
    EXPECT_DOUBLE_EQ(r.ci_low, r.plc_eq1);
    EXPECT_DOUBLE_EQ(r.ci_high, r.plc_eq1);
    EXPECT_FALSE(r.plc_eq2.has_value());  // no extreme-pair table injected
  }
  // The rows' w values are exactly the pie-rule outputs.
  EXPECT_EQ(rows[0].w[1], w_rdr(fixtures::table3c()[1]).w);
  EXPECT_EQ(rows[1].w[0], w_pr(fixtures::table3c()[0]).w);
}

TEST(Experiment, IdenticalPairGivesNearZeroPlc) {
  ExperimentConfig c;
  c.size = 5;
  c.pool = {labeled(mcts_player(8), "a"), labeled(mcts_player(8), "b")};
  c.games_per_cell = 40;
  c.master_seed = 3;
  c.rules = {ExperimentRule::RdrGfm, ExperimentRule::Free};
  c.bootstrap_resamples = 300;
  const auto rep = run_experiment(c, {.threads = 2});
  for (const auto& r : rep.rows) {
    if (r.rule == "GFM-min" || r.rule == "GFM-max") continue;  // selection over openings biases these
    EXPECT_LE(r.ci_low, 0.0) << r.rule;
    EXPECT_GE(r.ci_high, 0.0) << r.rule;
    EXPECT_EQ(r.depth_int, 1 + static_cast<int>(std::floor(std::max(0.0, r.plc_eq1) / kLevelRatio)));
  }
  // Averaged over openings the self-play gap vanishes.
  double mean = 0.0;
  for (double v : rep.gfm_per_opening) mean += v;
  EXPECT_LT(std::abs(mean / static_cast<double>(rep.gfm_per_opening.size())), 40.0);
}

TEST(Experiment, ColorAccountingAndReplay) {
  auto c = small_config();
  const fs::path dir = fresh_dir("accounting");
  c.output = (dir / "run").string();
  const auto rep = run_experiment(c);
  EXPECT_EQ(rep.matches, 3u * 4u * 2u * 3u);
  const auto records = load_log(output_paths(c.output).log, config_hash(c));
  EXPECT_EQ(records.size(), rep.matches);
  std::map<std::tuple<int, int, bool>, int> per_cell;
  for (const auto& r : records) {
    ++per_cell[{r.cell->pair, r.cell->opening, r.cell->strong_black}];
    EXPECT_TRUE(replay_matches(r));
    EXPECT_EQ(r.black, r.cell->strong_black ? r.strong : r.weak);
  }
  for (const auto& [key, n] : per_cell) EXPECT_EQ(n, c.games_per_cell);
  EXPECT_TRUE(verify_replay_log(output_paths(c.output).log).pass);

  ASSERT_TRUE(rep.tables.extremes.has_value());
  for (const auto& r : rep.rows) EXPECT_TRUE(r.plc_eq2.has_value()) << r.rule;
  EXPECT_EQ(rep.order, (std::vector<std::string>{"mcts-4", "mcts-16", "mcts-64"}));

  // The report is recomputable from the stored records alone.
  const auto again = build_report(c, records);
  EXPECT_EQ(to_csv(again), to_csv(rep));
}

TEST(Experiment, RerunIsByteIdenticalAndResumes) {
  auto c = small_config();
  const fs::path dir = fresh_dir("resume");
  c.output = (dir / "a").string();
  run_experiment(c, {.threads = 2});
  const std::string csv = slurp(output_paths(c.output).csv);
  const std::string log = slurp(output_paths(c.output).log);

  // Fresh run elsewhere with a different worker count and batch size.
  auto d = c;
  d.output = (dir / "b").string();
  run_experiment(d, {.threads = 1, .batch = 7});
  EXPECT_EQ(slurp(output_paths(d.output).csv), csv);

  // Interrupt: keep the first 40 lines plus half of the next one.
  std::istringstream in(log);
  std::string line, cut;
  for (int i = 0; i < 40 && std::getline(in, line); ++i) cut += line + "\n";
  std::getline(in, line);
  cut += line.substr(0, line.size() / 2);
  {
    std::ofstream out(output_paths(c.output).log, std::ios::binary | std::ios::trunc);
    out << cut;
  }
  std::size_t played = 0;
  run_experiment(c, {.threads = 1, .batch = 1000, .progress = [&](std::size_t, std::size_t total) { played = total; }});
  EXPECT_EQ(played, 3u * 4u * 2u * 3u - 40u);
  EXPECT_EQ(slurp(output_paths(c.output).csv), csv);
  EXPECT_EQ(load_log(output_paths(c.output).log).size(), 3u * 4u * 2u * 3u);
}

TEST(Experiment, CorruptLogsAreRejected) {
  auto c = small_config();
  c.games_per_cell = 1;
  const fs::path dir = fresh_dir("corrupt");
  c.output = (dir / "x").string();
  run_experiment(c);
  const std::string path = output_paths(c.output).log;
  const std::string log = slurp(path);

  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "not json\n" << log;
  }
  EXPECT_THROW(run_experiment(c), CorruptLog);

  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << log;
  }
  auto other = c;
  other.master_seed += 1;
  EXPECT_THROW(run_experiment(other), CorruptLog);

  auto first = from_json_line(nlohmann::json::parse(log.substr(0, log.find('\n'))));
  first.winner = opponent(first.winner);
  {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out << to_json_line(first).dump() << "\n";
  }
  EXPECT_THROW(run_experiment(c), CorruptLog);
}

TEST(Experiment, FreeOpeningReportHasOnlyFreeRow) {
  auto c = small_config();
  c.bootstrap_resamples = 100;
  const auto rep = free_opening_plc(c);
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_EQ(rep.rows[0].rule, "FREE");
  EXPECT_TRUE(std::isfinite(rep.rows[0].plc_eq1));
  EXPECT_LE(rep.rows[0].ci_low, rep.rows[0].plc_eq1);
  EXPECT_GE(rep.rows[0].ci_high, rep.rows[0].plc_eq1);
  EXPECT_EQ(rep.matches, 3u * 2u * 3u);
}

TEST(Report, CsvAndJsonShape) {
  auto c = small_config();
  c.rules = {ExperimentRule::Rdr, ExperimentRule::RdrPr, ExperimentRule::RdrGfm};
  const auto rep = run_experiment(c);
  const std::string csv = to_csv(rep);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "rule,plc_eq1,plc_eq2,depth_frac,depth_int,ci_low,ci_high");
  for (const char* rule : {"\nRDR,", "\nRDR+PR,", "\nGFM-max,", "\nGFM-min,"})
    EXPECT_NE(csv.find(rule), std::string::npos) << rule;
  const nlohmann::json j = rep;
  for (const char* key : {"rules", "order", "tables", "config_hash", "wall_seconds", "gfm_per_opening"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_NE(table_row(rep).find("RDR+PR"), std::string::npos);
}

TEST(Bootstrap, Calibration) {
  int covered = 0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    SplitMix64 rng(derive_seed(1000, s));
    std::uint64_t wins = 0;
    for (int i = 0; i < 10000; ++i) wins += rng.bernoulli(0.5) ? 1 : 0;
    const BinomialCell cell{static_cast<double>(wins) / 10000.0, 10000};
    const auto iv = bootstrap_ci(std::span<const BinomialCell>(&cell, 1),
                                 [](std::span<const BinomialCell> c) { return c[0].p; }, 200, derive_seed(2000, s));
    covered += iv.contains(0.5) ? 1 : 0;
  }
  EXPECT_GE(covered, 180);
  EXPECT_LE(covered, 198);
}

TEST(Bootstrap, DegenerateAndAnalyticCells) {
  const BinomialCell all_wins{1.0, 50};
  const auto iv = bootstrap_ci(std::span<const BinomialCell>(&all_wins, 1),
                               [](std::span<const BinomialCell> c) { return clamped_gap(c[0].p, c[0].n).gap; }, 100, 1);
  EXPECT_DOUBLE_EQ(iv.low, elo_gap(1.0 - 1.0 / 100.0));
  EXPECT_DOUBLE_EQ(iv.high, iv.low);

  const BinomialCell exact{0.7, 0};
  const auto z = bootstrap_ci(std::span<const BinomialCell>(&exact, 1),
                              [](std::span<const BinomialCell> c) { return c[0].p; }, 100, 1);
  EXPECT_DOUBLE_EQ(z.width(), 0.0);
  EXPECT_THROW(bootstrap_ci(std::span<const BinomialCell>(), [](auto) { return 0.0; }, 100, 1), ConfigError);
  EXPECT_THROW(bootstrap_ci(std::span<const BinomialCell>(&exact, 1), [](auto) { return 0.0; }, 99, 1), ConfigError);
}

TEST(Verify, Suites) {
  EXPECT_TRUE(verify_theorem1_random(2000, 7).pass);
  EXPECT_TRUE(verify_symmetry<NoGoState>(5, 20, 1).pass);
  EXPECT_TRUE(verify_symmetry<YState>(4, 20, 1).pass);
  EXPECT_TRUE(verify_nodraws<YState>(3, 0, 1).pass);
  EXPECT_TRUE(verify_nodraws<YState>(5, 500, 1).pass);
}
