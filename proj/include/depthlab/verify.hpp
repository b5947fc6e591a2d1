#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "depthlab/errors.hpp"
#include "depthlab/experiment.hpp"
#include "depthlab/game.hpp"
#include "depthlab/pie_rules.hpp"
#include "depthlab/pr_search.hpp"
#include "depthlab/rng.hpp"

namespace depthlab {

struct VerifyResult {
  bool pass = true;
  std::uint64_t checked = 0;
  std::string counterexample;  // filled on the first failure
};

/// w_pr <= max_i w_gfm on n random tables with 1..6 openings.
inline VerifyResult verify_theorem1_random(std::uint64_t n, std::uint64_t seed) {
  VerifyResult r;
  for (std::uint64_t t = 0; t < n; ++t) {
    SplitMix64 rng(derive_seed(seed, t));
    const auto k = 1 + rng.bounded(6);
    const WinrateTable table = random_table(rng, k);
    ++r.checked;
    if (!verify_theorem1(table)) {
      r.pass = false;
      r.counterexample = nlohmann::json(table).dump();
      return r;
    }
  }
  return r;
}

/// Random play with the state transformed by every group element after each
/// move: g(play(s, m)) == play(g(s), g(m)), and winners agree.
template <GameState S>
VerifyResult verify_symmetry(int size, std::uint64_t n, std::uint64_t seed) {
  VerifyResult r;
  const SymmetryGroup group = S::symmetries(size);
  for (std::uint64_t t = 0; t < n; ++t) {
    SplitMix64 rng(derive_seed(seed, t));
    S s = S::initial(size);
    for (;;) {
      const CellSet legal = s.legal_mask();
      if (legal.empty()) break;
      const Move m{legal.nth(static_cast<int>(rng.bounded(static_cast<std::uint64_t>(legal.count()))))};
      const S next = s.play(m);
      for (const Symmetry& g : group.elements()) {
        ++r.checked;
        const S lhs = next.transformed(g);
        const S rhs = s.transformed(g).play(g(m));
        if (!(lhs == rhs) || lhs.winner() != next.winner()) {
          r.pass = false;
          r.counterexample = "symmetry " + g.name() + " breaks at move " + next.cell_name(m.cell) + "\n" + s.diagram();
          return r;
        }
      }
      s = next;
    }
  }
  return r;
}

namespace detail {

template <GameState S>
bool all_leaves_decided(const S& s, std::uint64_t& leaves, std::string& bad) {
  const CellSet legal = s.legal_mask();
  if (legal.empty()) {
    ++leaves;
    if (!s.winner()) {
      bad = s.diagram();
      return false;
    }
    return true;
  }
  bool ok = true;
  legal.for_each([&](int c) {
    if (ok) ok = all_leaves_decided(s.play(Move{c}), leaves, bad);
  });
  return ok;
}

}  // namespace detail

/// Every terminal position has a winner. Exhaustive for boards of at most
/// six cells, otherwise n random playouts.
template <GameState S>
VerifyResult verify_nodraws(int size, std::uint64_t n, std::uint64_t seed) {
  VerifyResult r;
  const S start = S::initial(size);
  if (start.cell_count() <= 6) {
    r.pass = detail::all_leaves_decided(start, r.checked, r.counterexample);
    return r;
  }
  for (std::uint64_t t = 0; t < n; ++t) {
    SplitMix64 rng(derive_seed(seed, t));
    S s = start;
    int moves = 0;
    for (CellSet legal = s.legal_mask(); !legal.empty(); legal = s.legal_mask()) {
      s.apply(Move{legal.nth(static_cast<int>(rng.bounded(static_cast<std::uint64_t>(legal.count()))))});
      ++moves;
    }
    ++r.checked;
    if (!s.winner() || moves > start.cell_count()) {
      r.pass = false;
      r.counterexample = s.diagram();
      return r;
    }
  }
  return r;
}

/// Every record of a match log replays to its recorded winner.
inline VerifyResult verify_replay_log(const std::string& path) {
  VerifyResult r;
  for (const MatchRecord& rec : load_log(path)) {
    ++r.checked;
    if (!replay_matches(rec)) {
      r.pass = false;
      r.counterexample = to_json_line(rec).dump();
      return r;
    }
  }
  return r;
}

}  // namespace depthlab
