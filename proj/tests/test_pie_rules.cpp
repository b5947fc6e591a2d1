#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "depthlab/fixtures.hpp"
#include "depthlab/pie_rules.hpp"
#include "depthlab/pr_search.hpp"

using namespace depthlab;

namespace {

// Closed forms written out directly from the definitions.
double oracle_rdr(const WinrateTable& t) {
  double max_p = 0.0, min_q = 1.0;
  for (const auto& o : t.openings) {
    max_p = std::max(max_p, o.p);
    min_q = std::min(min_q, o.q);
  }
  return (max_p + min_q) / 2.0;
}

double oracle_pr(const WinrateTable& t) {
  double min_max = 1.0, max_min = 0.0;
  for (const auto& o : t.openings) {
    min_max = std::min(min_max, std::max(o.p, o.q));
    max_min = std::max(max_min, std::min(o.p, o.q));
  }
  return (min_max + max_min) / 2.0;
}

double best_gfm(const WinrateTable& t) {
  double best = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) best = std::max(best, w_gfm(t, i).w);
  return best;
}

}  // namespace

TEST(Gfm, Examples) {
  EXPECT_DOUBLE_EQ(w_gfm(fixtures::table3a(), 0).w, 0.95);
  EXPECT_DOUBLE_EQ(w_gfm(WinrateTable{"s", "w", {{"A", 0.5, 0.5, 0, 0}}}, 0).w, 0.5);
  EXPECT_DOUBLE_EQ(w_gfm(fixtures::table3c()[1], 0).w, 0.975);
  EXPECT_THROW(w_gfm(fixtures::table3a(), 2), ConfigError);
}

TEST(Rdr, Examples) {
  EXPECT_NEAR(w_rdr(fixtures::table3b()).w, 0.50005, 1e-12);
  EXPECT_NEAR(w_rdr(WinrateTable{"s", "w", {{"A", 0.7, 0.7, 0, 0}}}).w, 0.7, 1e-12);
  EXPECT_NEAR(w_rdr(fixtures::table3a()).w, 0.95, 1e-12);
  EXPECT_EQ(*w_rdr(fixtures::table3a()).opening_id, "A");
}

TEST(Pr, Examples) {
  EXPECT_NEAR(w_pr(fixtures::table3a()).w, 0.90, 1e-12);
  EXPECT_NEAR(w_pr(fixtures::table3b()).w, 0.75, 1e-12);
  const WinrateTable diag{"s", "w", {{"A", 0.3, 0.3, 0, 0}, {"B", 0.8, 0.8, 0, 0}, {"C", 0.6, 0.6, 0, 0}}};
  EXPECT_NEAR(w_pr(diag).w, (0.3 + 0.8) / 2.0, 1e-12);
}

TEST(Pr, EmptyTableRejected) {
  EXPECT_THROW(w_pr(WinrateTable{"s", "w", {}}), ConfigError);
  EXPECT_THROW(nlohmann::json::parse(R"({"pair":["a","b"],"openings":[]})").get<WinrateTable>(), ConfigError);
}

TEST(PrDecision, Examples) {
  const auto d = pr_decision(fixtures::table3b(), true);
  EXPECT_EQ(d.id, "A");
  EXPECT_FALSE(d.stronger_is_black);
  EXPECT_TRUE(d.swap);

  const WinrateTable one{"s", "w", {{"A", 0.8, 0.6, 0, 0}}};
  const auto s = pr_decision(one, true);
  EXPECT_EQ(s.opening, 0u);
  EXPECT_FALSE(s.stronger_is_black);  // weaker opponent leaves us the 0.6 side
  const auto w = pr_decision(one, false);
  EXPECT_TRUE(w.stronger_is_black);  // stronger opponent takes the 0.8 side
  EXPECT_DOUBLE_EQ(w.w, 0.8);

  const WinrateTable diag{"s", "w", {{"A", 0.3, 0.3, 0, 0}, {"B", 0.8, 0.8, 0, 0}}};
  EXPECT_EQ(pr_decision(diag, true).id, "B");
}

TEST(PieRuleBound, FixturesHold) {
  EXPECT_TRUE(verify_theorem1(fixtures::table3a()));
  EXPECT_TRUE(verify_theorem1(fixtures::table3b()));
  EXPECT_NEAR(best_gfm(fixtures::table3b()), 0.75, 1e-12);
}

TEST(PieRuleBound, RandomTablesAgainstClosedForms) {
  SplitMix64 rng(31);
  for (int t = 0; t < 100000; ++t) {
    const auto table = random_table(rng, 1 + rng.bounded(6));
    const double pr = w_pr(table).w;
    ASSERT_NEAR(pr, oracle_pr(table), 1e-15);
    ASSERT_NEAR(w_rdr(table).w, oracle_rdr(table), 1e-15);
    ASSERT_LE(pr, best_gfm(table) + 1e-12);
  }
}

TEST(Lemma, SwappingOneOpeningsSidesKeepsPrAndGfm) {
  SplitMix64 rng(32);
  int rdr_changed = 0;
  for (int t = 0; t < 20000; ++t) {
    const auto table = random_table(rng, 1 + rng.bounded(6));
    auto swapped = table;
    auto& o = swapped.openings[rng.bounded(swapped.size())];
    std::swap(o.p, o.q);
    EXPECT_NEAR(w_pr(swapped).w, w_pr(table).w, 1e-15);
    for (std::size_t i = 0; i < table.size(); ++i) EXPECT_NEAR(w_gfm(swapped, i).w, w_gfm(table, i).w, 1e-15);
    rdr_changed += std::abs(w_rdr(swapped).w - w_rdr(table).w) > 1e-12 ? 1 : 0;
  }
  EXPECT_GT(rdr_changed, 1000);
}

TEST(Normalization, EveryRuleWithinTableRange) {
  SplitMix64 rng(33);
  for (int t = 0; t < 20000; ++t) {
    const auto table = random_table(rng, 1 + rng.bounded(6));
    double lo = 1.0, hi = 0.0;
    for (const auto& o : table.openings) {
      lo = std::min({lo, o.p, o.q});
      hi = std::max({hi, o.p, o.q});
    }
    std::vector<double> ws{w_rdr(table).w, w_pr(table).w};
    for (std::size_t i = 0; i < table.size(); ++i) ws.push_back(w_gfm(table, i).w);
    for (double w : ws) {
      EXPECT_GE(w, lo - 1e-15);
      EXPECT_LE(w, hi + 1e-15);
    }
  }
}

TEST(Normalization, StrongerPlayerKeepsHalf) {
  SplitMix64 rng(34);
  for (int t = 0; t < 20000; ++t) {
    WinrateTable table{"s", "w", {}};
    const auto k = 1 + rng.bounded(6);
    for (std::size_t i = 0; i < k; ++i)
      table.openings.push_back({"o" + std::to_string(i), 0.5 + rng.uniform() / 2, 0.5 + rng.uniform() / 2, 0, 0});
    EXPECT_GE(w_rdr(table).w, 0.5);
    EXPECT_GE(w_pr(table).w, 0.5);
    for (std::size_t i = 0; i < k; ++i) EXPECT_GE(w_gfm(table, i).w, 0.5);
  }
}

TEST(PrDecision, SimulatedPlayConvergesToFormula) {
  // Roles drawn at random, the mover plays the rational opening, the
  // opponent keeps or swaps as decided, and the result is sampled.
  SplitMix64 rng(35);
  for (int t = 0; t < 5; ++t) {
    const auto table = random_table(rng, 2 + rng.bounded(4));
    const auto strong = pr_decision(table, true), weak = pr_decision(table, false);
    const int n = 100000;
    int wins = 0;
    for (int g = 0; g < n; ++g) {
      const PrDecision& d = rng.bernoulli(0.5) ? strong : weak;
      const auto& o = table.openings[d.opening];
      wins += rng.bernoulli(d.stronger_is_black ? o.p : o.q) ? 1 : 0;
    }
    const double w = w_pr(table).w;
    const double sigma = std::sqrt(w * (1 - w) / n);
    EXPECT_NEAR(static_cast<double>(wins) / n, w, 3 * sigma + 1e-12);
  }
}

TEST(PoolPlc, Table3cGaps) {
  const auto pool = fixtures::table3c();
  const auto a = plc_under_rule(pool, FirstMoveRule::RdrGfm, 0);
  EXPECT_NEAR(a.gaps[1], 636.426, 0.05);
  EXPECT_NEAR(a.gaps[0], 13.905, 0.05);
  EXPECT_LT(a.plc, 651);
  const auto b = plc_under_rule(pool, FirstMoveRule::RdrGfm, 1);
  EXPECT_NEAR(b.gaps[1], 275.452, 0.05);
  EXPECT_NEAR(b.gaps[0], 251.893, 0.05);
  EXPECT_NEAR(b.plc, 527.35, 0.05);
  const auto pr = plc_under_rule(pool, FirstMoveRule::RdrPr);
  EXPECT_NEAR(pr.gaps[1], 530.72, 0.05);
  EXPECT_NEAR(pr.gaps[0], 126.97, 0.05);
  EXPECT_GT(pr.plc, 657);
  EXPECT_THROW(plc_under_rule({}, FirstMoveRule::Rdr), ConfigError);
}

TEST(GfmProfile, EnvelopeAndMismatch) {
  const auto prof = gfm_profile(fixtures::table3c());
  EXPECT_EQ(prof.best, 0u);
  EXPECT_EQ(prof.worst, 1u);
  EXPECT_NEAR(prof.upper_envelope, 636.426 + 251.893, 0.05);
  auto pool = fixtures::table3c();
  pool[0].openings.pop_back();
  EXPECT_THROW(gfm_profile(pool), ConfigError);
}

TEST(Search, Table3cIsAHit) {
  const auto margin = pr_superiority_margin(fixtures::table3c());
  ASSERT_TRUE(margin.has_value());
  EXPECT_NEAR(*margin, 7.4, 0.5);
}

TEST(Search, FindsThreePlayerHitsButNoSinglePairHits) {
  const auto hits = search_pr_superiority(3, 2, 10000, 42, 2);
  EXPECT_GT(hits.size(), 0u);
  for (std::size_t i = 1; i < hits.size(); ++i) EXPECT_LT(hits[i - 1].trial, hits[i].trial);
  for (const auto& h : hits) EXPECT_NEAR(*pr_superiority_margin(h.pool), h.margin, 1e-12);
  EXPECT_TRUE(search_pr_superiority(2, 2, 20000, 42, 2).empty());
}

TEST(Search, ResultIndependentOfWorkerCount) {
  const auto a = search_pr_superiority(3, 2, 3000, 7, 1);
  const auto b = search_pr_superiority(3, 2, 3000, 7, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].trial, b[i].trial);
    EXPECT_EQ(a[i].margin, b[i].margin);
  }
}

TEST(Fixtures, NamesAndJson) {
  for (const auto& n : fixtures::names()) EXPECT_FALSE(fixtures::by_name(n).empty());
  EXPECT_THROW(fixtures::by_name("table9"), ConfigError);
  const auto t = fixtures::table3c()[1];
  EXPECT_EQ(nlohmann::json(t).get<WinrateTable>(), t);
  EXPECT_EQ(nlohmann::json(t).at("pair")[0], "1");
}
