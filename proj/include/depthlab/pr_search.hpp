#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "depthlab/errors.hpp"
#include "depthlab/parallel.hpp"
#include "depthlab/pie_rules.hpp"
#include "depthlab/rng.hpp"

namespace depthlab {

/// Table with independent uniform p, q per opening.
inline WinrateTable random_table(SplitMix64& rng, std::size_t openings, std::string strong = "s",
                                 std::string weak = "w") {
  WinrateTable t{std::move(strong), std::move(weak), {}};
  for (std::size_t i = 0; i < openings; ++i) {
    const double p = rng.uniform();
    const double q = rng.uniform();
    t.openings.push_back({std::string(1, static_cast<char>('A' + i % 26)) + (i >= 26 ? std::to_string(i) : ""), p, q, 0, 0});
  }
  return t;
}

/// Random pool of n_players - 1 adjacent-pair tables.
inline std::vector<WinrateTable> random_pool(SplitMix64& rng, int n_players, std::size_t openings) {
  std::vector<WinrateTable> pool;
  for (int k = 0; k + 1 < n_players; ++k)
    pool.push_back(random_table(rng, openings, "p" + std::to_string(k + 1), "p" + std::to_string(k)));
  return pool;
}

struct PrSuperiorityHit {
  std::uint64_t trial = 0;
  double margin = 0.0;  // PLC(PR) - max_i PLC(GFM_i), Elo
  std::vector<WinrateTable> pool;
};

/// A pool is a hit when the pie rule yields a larger PLC than every fixed
/// opening shared by all pairs.
inline std::optional<double> pr_superiority_margin(const std::vector<WinrateTable>& pool) {
  const double pr = plc_under_rule(pool, FirstMoveRule::RdrPr).plc;
  const double best_fixed = gfm_profile(pool).max_plc;
  if (pr > best_fixed + 1e-9) return pr - best_fixed;
  return std::nullopt;
}

/// Samples `trials` random pools; trial t uses the stream
/// derive_seed(seed, t), so results do not depend on the worker count.
/// Hits come back ordered by trial index.
inline std::vector<PrSuperiorityHit> search_pr_superiority(int n_players, std::size_t openings, std::uint64_t trials,
                                                           std::uint64_t seed, int threads = 1) {
  if (n_players < 2) throw ConfigError("need at least 2 players");
  if (openings < 1) throw ConfigError("need at least 1 opening");
  if (trials < 1) throw ConfigError("need at least 1 trial");
  const int workers = std::max(1, threads);
  const std::uint64_t chunk = (trials + static_cast<std::uint64_t>(workers) - 1) / static_cast<std::uint64_t>(workers);
  std::vector<std::vector<PrSuperiorityHit>> found(static_cast<std::size_t>(workers));
  parallel_for(static_cast<std::size_t>(workers), workers, [&](std::size_t w) {
    const std::uint64_t begin = w * chunk;
    const std::uint64_t end = std::min(trials, begin + chunk);
    for (std::uint64_t t = begin; t < end; ++t) {
      SplitMix64 rng(derive_seed(seed, t));
      auto pool = random_pool(rng, n_players, openings);
      // Exact zero or one never occurs with 53-bit uniforms in practice;
      // skip rather than divide by zero if it does.
      try {
        if (auto margin = pr_superiority_margin(pool)) found[w].push_back({t, *margin, std::move(pool)});
      } catch (const DomainError&) {
      }
    }
  });
  std::vector<PrSuperiorityHit> hits;
  for (auto& part : found)
    for (auto& h : part) hits.push_back(std::move(h));
  return hits;
}

}  // namespace depthlab
