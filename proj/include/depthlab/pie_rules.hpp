#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depthlab/elo.hpp"
#include "depthlab/errors.hpp"
#include "depthlab/winrate_table.hpp"

namespace depthlab {

/// First-move regimes: random roles with a free opening (RDR), the same with
/// the pie rule (RDR+PR), and random roles with an opening fixed by the rules
/// (RDR+GFM_i).
enum class FirstMoveRule { Rdr, RdrPr, RdrGfm };

inline std::string_view to_string(FirstMoveRule r) {
  switch (r) {
    case FirstMoveRule::Rdr: return "RDR";
    case FirstMoveRule::RdrPr: return "RDR+PR";
    case FirstMoveRule::RdrGfm: return "RDR+GFM";
  }
  return "?";
}

/// Rational choices under the pie rule for one mover. The mover places
/// `opening` as Black; the opponent then keeps or swaps colors.
struct PrDecision {
  std::size_t opening = 0;
  std::string id;
  bool swap = false;              // roles exchanged after the first move
  bool stronger_is_black = true;  // final role of the stronger player
  double w = 0.0;                 // stronger player's resulting winrate
};

struct RuleOutcome {
  FirstMoveRule rule = FirstMoveRule::Rdr;
  double w = 0.0;                           // stronger player's success rate
  std::optional<std::size_t> opening;       // GFM: the fixed index; RDR/PR: the stronger mover's pick
  std::optional<std::string> opening_id;
  std::optional<bool> swap;                 // PR only: swap after the stronger mover's opening
  std::optional<PrDecision> weaker_moves;   // PR and RDR: what happens when the weaker player opens
  std::uint64_t games = 0;                  // games behind w; 0 = exact
};

/// RDR+GFM_i: w = (p_i + q_i) / 2.
inline RuleOutcome w_gfm(const WinrateTable& t, std::size_t i) {
  if (i >= t.size()) throw ConfigError("opening index " + std::to_string(i) + " out of range");
  const auto& o = t.openings[i];
  RuleOutcome r;
  r.rule = FirstMoveRule::RdrGfm;
  r.w = (o.p + o.q) / 2.0;
  r.opening = i;
  r.opening_id = o.id;
  r.games = o.n_p + o.n_q;
  return r;
}

/// RDR: w = (max_i p_i + min_i q_i) / 2. Each mover picks the opening best
/// for themselves.
inline RuleOutcome w_rdr(const WinrateTable& t) {
  t.validate();
  std::size_t best_p = 0;
  std::size_t worst_q = 0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t.openings[i].p > t.openings[best_p].p) best_p = i;
    if (t.openings[i].q < t.openings[worst_q].q) worst_q = i;
  }
  RuleOutcome r;
  r.rule = FirstMoveRule::Rdr;
  r.w = (t.openings[best_p].p + t.openings[worst_q].q) / 2.0;
  r.opening = best_p;
  r.opening_id = t.openings[best_p].id;
  r.weaker_moves = PrDecision{worst_q, t.openings[worst_q].id, false, false, t.openings[worst_q].q};
  r.games = t.openings[best_p].n_p + t.openings[worst_q].n_q;
  return r;
}

/// Rational pie-rule play when `mover_is_stronger` opens.
///
/// Stronger mover: opening maximizing min(p_i, q_i); the weaker opponent
/// hands the stronger player the side achieving that minimum. Weaker mover:
/// opening minimizing max(p_i, q_i); the stronger opponent takes the side
/// achieving the maximum. Ties go to the lower opening index and to keeping
/// colors.
inline PrDecision pr_decision(const WinrateTable& t, bool mover_is_stronger) {
  t.validate();
  PrDecision d;
  if (mover_is_stronger) {
    auto value = [&](std::size_t i) { return std::min(t.openings[i].p, t.openings[i].q); };
    for (std::size_t i = 1; i < t.size(); ++i)
      if (value(i) > value(d.opening)) d.opening = i;
    const auto& o = t.openings[d.opening];
    // Mover starts as Black; weaker opponent swaps when White is worse for us.
    d.stronger_is_black = o.p <= o.q;
    d.swap = !d.stronger_is_black;
    d.w = value(d.opening);
  } else {
    auto value = [&](std::size_t i) { return std::max(t.openings[i].p, t.openings[i].q); };
    for (std::size_t i = 1; i < t.size(); ++i)
      if (value(i) < value(d.opening)) d.opening = i;
    const auto& o = t.openings[d.opening];
    // Weaker mover starts as Black; stronger opponent swaps to take Black
    // when Black is the better side.
    d.stronger_is_black = o.p > o.q;
    d.swap = d.stronger_is_black;
    d.w = value(d.opening);
  }
  d.id = t.openings[d.opening].id;
  return d;
}

/// RDR+PR: w = (min_i max(p_i, q_i) + max_i min(p_i, q_i)) / 2.
inline RuleOutcome w_pr(const WinrateTable& t) {
  const PrDecision strong = pr_decision(t, true);
  const PrDecision weak = pr_decision(t, false);
  RuleOutcome r;
  r.rule = FirstMoveRule::RdrPr;
  r.w = (strong.w + weak.w) / 2.0;
  r.opening = strong.opening;
  r.opening_id = strong.id;
  r.swap = strong.swap;
  r.weaker_moves = weak;
  const auto& a = t.openings[strong.opening];
  const auto& b = t.openings[weak.opening];
  r.games = (strong.stronger_is_black ? a.n_p : a.n_q) + (weak.stronger_is_black ? b.n_p : b.n_q);
  return r;
}

/// True when the pie-rule rate does not exceed the best fixed opening.
inline bool verify_theorem1(const WinrateTable& t) {
  double best = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) best = std::max(best, w_gfm(t, i).w);
  return w_pr(t).w <= best + 1e-12;
}

inline RuleOutcome evaluate_rule(const WinrateTable& t, FirstMoveRule rule, std::size_t gfm_index = 0) {
  switch (rule) {
    case FirstMoveRule::Rdr: return w_rdr(t);
    case FirstMoveRule::RdrPr: return w_pr(t);
    case FirstMoveRule::RdrGfm: return w_gfm(t, gfm_index);
  }
  throw ConfigError("unknown rule");
}

/// Elo gap implied by a rule outcome, with estimated rates clamped by the
/// number of games behind them.
inline double outcome_gap(const RuleOutcome& r) { return clamped_gap(r.w, r.games).gap; }

struct PoolPlc {
  std::vector<double> gaps;  // one per adjacent pair, weakest pair first
  double plc = 0.0;
};

/// Chain PLC over a pool of adjacent-pair tables. pool[k] holds player k + 1
/// (stronger) against player k. Under GFM the same opening index applies to
/// every pair.
inline PoolPlc plc_under_rule(const std::vector<WinrateTable>& pool, FirstMoveRule rule, std::size_t gfm_index = 0) {
  if (pool.empty()) throw ConfigError("empty pool");
  PoolPlc out;
  for (const auto& t : pool) {
    const double gap = outcome_gap(evaluate_rule(t, rule, gfm_index));
    out.gaps.push_back(gap);
    out.plc += gap;
  }
  return out;
}

struct GfmProfile {
  std::vector<PoolPlc> per_opening;
  std::size_t best = 0;
  std::size_t worst = 0;
  double max_plc = 0.0;
  double min_plc = 0.0;
  double upper_envelope = 0.0;  // each pair using its own best opening
};

inline GfmProfile gfm_profile(const std::vector<WinrateTable>& pool) {
  if (pool.empty()) throw ConfigError("empty pool");
  const std::size_t k = pool.front().size();
  for (const auto& t : pool) {
    t.validate();
    if (t.size() != k) throw ConfigError("GFM needs the same openings in every table of the pool");
  }
  GfmProfile prof;
  for (std::size_t i = 0; i < k; ++i) prof.per_opening.push_back(plc_under_rule(pool, FirstMoveRule::RdrGfm, i));
  for (std::size_t i = 1; i < k; ++i) {
    if (prof.per_opening[i].plc > prof.per_opening[prof.best].plc) prof.best = i;
    if (prof.per_opening[i].plc < prof.per_opening[prof.worst].plc) prof.worst = i;
  }
  prof.max_plc = prof.per_opening[prof.best].plc;
  prof.min_plc = prof.per_opening[prof.worst].plc;
  for (std::size_t pair = 0; pair < pool.size(); ++pair) {
    double best = prof.per_opening.front().gaps[pair];
    for (const auto& po : prof.per_opening) best = std::max(best, po.gaps[pair]);
    prof.upper_envelope += best;
  }
  return prof;
}

}  // namespace depthlab
