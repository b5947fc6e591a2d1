#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "depthlab/elo.hpp"
#include "depthlab/errors.hpp"

namespace depthlab {

struct DepthChain {
  int length = 1;
  std::vector<std::size_t> chain;  // strongest first; chain[i] beats chain[i + 1]
};

/// Longest sequence of distinct players where each beats the next with
/// probability >= threshold.
///
/// The "beats" digraph may contain cycles, so this is a longest simple path.
/// reach[mask] holds the set of vertices at which some path visiting exactly
/// `mask` can end; the table has 2^n entries, hence the n <= 20 limit.
inline DepthChain depth_chain(const WinMatrix& m, double threshold = 0.6) {
  const std::size_t n = m.size();
  if (n == 0) throw ConfigError("depth_chain needs at least one player");
  if (n > 20) throw ConfigError("depth_chain supports at most 20 players");
  std::vector<std::uint32_t> beats(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && m.p[i][j] >= threshold) beats[i] |= 1u << j;

  const std::uint32_t full = n == 32 ? ~0u : (1u << n) - 1;
  std::vector<std::uint32_t> reach(static_cast<std::size_t>(full) + 1, 0);
  for (std::size_t v = 0; v < n; ++v) reach[1u << v] = 1u << v;
  std::uint32_t best_mask = 1;
  int best_len = 1;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    const std::uint32_t ends = reach[mask];
    if (ends == 0) continue;
    const int len = std::popcount(mask);
    if (len > best_len) {
      best_len = len;
      best_mask = mask;
    }
    for (std::uint32_t e = ends; e != 0; e &= e - 1) {
      const int v = std::countr_zero(e);
      for (std::uint32_t next = beats[static_cast<std::size_t>(v)] & ~mask; next != 0; next &= next - 1) {
        const int w = std::countr_zero(next);
        reach[mask | (1u << w)] |= 1u << w;
      }
    }
  }

  // Walk back from the lowest end vertex of the first longest mask.
  DepthChain out;
  out.length = best_len;
  std::uint32_t mask = best_mask;
  int v = std::countr_zero(reach[mask]);
  out.chain.push_back(static_cast<std::size_t>(v));
  while (std::popcount(mask) > 1) {
    const std::uint32_t rest = mask & ~(1u << v);
    int prev = -1;
    for (std::uint32_t e = reach[rest]; e != 0; e &= e - 1) {
      const int u = std::countr_zero(e);
      if (beats[static_cast<std::size_t>(u)] & (1u << v)) {
        prev = u;
        break;
      }
    }
    out.chain.push_back(static_cast<std::size_t>(prev));
    mask = rest;
    v = prev;
  }
  std::reverse(out.chain.begin(), out.chain.end());
  return out;
}

/// Depth and PLC summary of a player pool.
struct DepthReport {
  double plc_chain = 0.0;
  double plc_extremes = 0.0;
  double depth_fractional = 0.0;
  int depth_integer = 1;
  std::vector<std::size_t> chain;
  std::vector<std::size_t> order;  // weakest to strongest, used for plc_chain
  std::vector<double> gaps;
  std::vector<bool> clamped;
  double sensitivity_low = 0.0;
  double sensitivity_high = 0.0;
  int chain_length = 1;
};

inline DepthReport depth_report(const WinMatrix& m, double threshold = 0.6) {
  m.validate();
  DepthReport r;
  r.order = order_by_score(m);
  const PlcChain chain = plc_chain(m, r.order);
  r.plc_chain = chain.plc;
  r.gaps = chain.gaps;
  r.clamped = chain.clamped;
  r.sensitivity_low = chain.sensitivity_low;
  r.sensitivity_high = chain.sensitivity_high;
  if (m.size() > 1) {
    const std::size_t weak = r.order.front();
    const std::size_t strong = r.order.back();
    r.plc_extremes = clamped_gap(m.p[strong][weak], m.games(strong, weak)).gap;
  }
  const auto levels = depth_from_plc(std::max(0.0, r.plc_chain));
  r.depth_fractional = levels.fractional;
  r.depth_integer = levels.integer;
  const DepthChain dc = depth_chain(m, threshold);
  r.chain = dc.chain;
  r.chain_length = dc.length;
  return r;
}

inline void to_json(nlohmann::json& j, const DepthReport& r) {
  j = nlohmann::json{{"plc_chain", r.plc_chain},
                     {"plc_extremes", r.plc_extremes},
                     {"depth_fractional", r.depth_fractional},
                     {"depth_integer", r.depth_integer},
                     {"chain", r.chain},
                     {"chain_length", r.chain_length},
                     {"order", r.order},
                     {"gaps", r.gaps},
                     {"clamped", r.clamped},
                     {"plc_sensitivity", {r.sensitivity_low, r.sensitivity_high}}};
}

}  // namespace depthlab
