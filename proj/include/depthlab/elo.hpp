#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "depthlab/errors.hpp"

namespace depthlab {

/// Probability that a player rated `ra` beats one rated `rb`.
inline double elo_win_prob(double ra, double rb) { return 1.0 / (1.0 + std::pow(10.0, (rb - ra) / 400.0)); }

/// Rating gap implied by a win probability: -400 log10(1/p - 1).
inline double elo_gap(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("elo_gap needs 0 < p < 1, got " + std::to_string(p));
  return -400.0 * std::log10(1.0 / p - 1.0);
}

/// Elo points per depth level: the gap at which the stronger side wins 60%.
inline const double kLevelRatio = elo_gap(0.6);

/// A probability estimated from `games` games, pulled into
/// [1/(2 games), 1 - 1/(2 games)]. games == 0 marks an exact value, which is
/// returned unchanged.
struct ClampedProbability {
  double value;
  bool clamped;
};

inline ClampedProbability clamp_probability(double p, std::uint64_t games, double eps_scale = 0.5) {
  if (games == 0) return {p, false};
  const double eps = eps_scale / static_cast<double>(games);
  if (p < eps) return {eps, true};
  if (p > 1.0 - eps) return {1.0 - eps, true};
  return {p, false};
}

/// Playing-level complexity read off the extreme pair alone.
inline double plc_extremes(double p_strong_vs_weak) { return elo_gap(p_strong_vs_weak); }

struct DepthLevels {
  double fractional;
  int integer;
};

inline DepthLevels depth_from_plc(double plc) {
  if (plc < 0.0 || !std::isfinite(plc)) throw DomainError("depth_from_plc needs a finite plc >= 0");
  const double frac = plc / kLevelRatio;
  return {frac, 1 + static_cast<int>(std::floor(frac))};
}

/// Pairwise win probabilities; p[i][j] is the chance that i beats j, draws
/// counted as half wins. counts[i][j] == 0 marks an exact value.
struct WinMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> p;
  std::vector<std::vector<std::uint64_t>> counts;

  std::size_t size() const { return p.size(); }

  static WinMatrix from_ratings(const std::vector<double>& ratings) {
    WinMatrix m;
    const std::size_t n = ratings.size();
    m.p.assign(n, std::vector<double>(n, 0.5));
    m.counts.assign(n, std::vector<std::uint64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      m.labels.push_back("p" + std::to_string(i));
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) m.p[i][j] = elo_win_prob(ratings[i], ratings[j]);
    }
    return m;
  }

  void validate() const {
    const std::size_t n = p.size();
    if (n == 0) throw ConfigError("win matrix is empty");
    if (labels.size() != n) throw ConfigError("win matrix labels do not match its size");
    if (!counts.empty() && counts.size() != n) throw ConfigError("win matrix counts do not match its size");
    for (std::size_t i = 0; i < n; ++i) {
      if (p[i].size() != n || (!counts.empty() && counts[i].size() != n))
        throw ConfigError("win matrix is not square");
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        if (!(p[i][j] >= 0.0 && p[i][j] <= 1.0)) throw ConfigError("win probability outside [0,1]");
        if (std::abs(p[i][j] + p[j][i] - 1.0) > 1e-9)
          throw ConfigError("p[" + std::to_string(i) + "][" + std::to_string(j) + "] + p[j][i] != 1");
      }
    }
  }

  std::uint64_t games(std::size_t i, std::size_t j) const { return counts.empty() ? 0 : counts[i][j]; }
};

inline void to_json(nlohmann::json& j, const WinMatrix& m) {
  j = nlohmann::json{{"labels", m.labels}, {"p", m.p}, {"counts", m.counts}};
}

inline void from_json(const nlohmann::json& j, WinMatrix& m) {
  m.labels = j.at("labels").get<std::vector<std::string>>();
  m.p = j.at("p").get<std::vector<std::vector<double>>>();
  m.counts = j.contains("counts") ? j.at("counts").get<std::vector<std::vector<std::uint64_t>>>()
                                  : std::vector<std::vector<std::uint64_t>>{};
  m.validate();
}

/// Players sorted weakest to strongest by mean score against the rest of the
/// pool; ties by label.
inline std::vector<std::size_t> order_by_score(const WinMatrix& m) {
  const std::size_t n = m.size();
  std::vector<double> score(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) score[i] += m.p[i][j];
    if (n > 1) score[i] /= static_cast<double>(n - 1);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] < score[b];
    return m.labels[a] < m.labels[b];
  });
  return order;
}

struct PlcChain {
  double plc = 0.0;
  std::vector<double> gaps;          // one per adjacent pair, weakest pair first
  std::vector<bool> clamped;         // pair probability was pulled off 0 or 1
  double sensitivity_low = 0.0;      // PLC range over clamp widths 1/(4g) .. 1/g
  double sensitivity_high = 0.0;
};

/// Gap for one estimated probability at the default clamp plus its range
/// over the alternative clamp widths.
struct ClampedGap {
  double gap;
  bool clamped;
  double low;
  double high;
};

inline ClampedGap clamped_gap(double p, std::uint64_t games) {
  const auto mid = clamp_probability(p, games, 0.5);
  const double gap = elo_gap(mid.value);
  double low = gap;
  double high = gap;
  for (double scale : {0.25, 1.0}) {
    const double g = elo_gap(clamp_probability(p, games, scale).value);
    low = std::min(low, g);
    high = std::max(high, g);
  }
  return {gap, mid.clamped, low, high};
}

/// Playing-level complexity as the sum of adjacent gaps along `order` (weakest first).
inline PlcChain plc_chain(const WinMatrix& m, const std::vector<std::size_t>& order) {
  if (order.size() != m.size()) throw ConfigError("order must list every player once");
  PlcChain out;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    const std::size_t weak = order[k];
    const std::size_t strong = order[k + 1];
    const auto g = clamped_gap(m.p[strong][weak], m.games(strong, weak));
    out.gaps.push_back(g.gap);
    out.clamped.push_back(g.clamped);
    out.plc += g.gap;
    out.sensitivity_low += g.low;
    out.sensitivity_high += g.high;
  }
  return out;
}

}  // namespace depthlab
