#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "depthlab/errors.hpp"
#include "depthlab/rng.hpp"

namespace depthlab {

/// An estimated success rate p over n trials; n == 0 marks an exact value
/// that is never resampled.
struct BinomialCell {
  double p = 0.5;
  std::uint64_t n = 0;
};

struct Interval {
  double low = 0.0;
  double high = 0.0;

  bool contains(double x) const { return low <= x && x <= high; }
  double width() const { return high - low; }
};

/// Linear-interpolated quantile of sorted data.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw UsageError("quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Draws each cell's successes from Binomial(n, p), returns the new cells.
inline void resample_cells(std::span<const BinomialCell> cells, std::span<BinomialCell> out, SplitMix64& rng) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const BinomialCell& c = cells[i];
    if (c.n == 0) {
      out[i] = c;
      continue;
    }
    std::uint64_t wins = 0;
    for (std::uint64_t k = 0; k < c.n; ++k) wins += rng.bernoulli(c.p) ? 1 : 0;
    out[i] = BinomialCell{static_cast<double>(wins) / static_cast<double>(c.n), c.n};
  }
}

/// Percentile intervals for a vector-valued statistic under per-cell
/// binomial resampling. `statistic(cells)` returns one value per component.
template <class Statistic>
std::vector<Interval> bootstrap_intervals(std::span<const BinomialCell> cells, Statistic&& statistic, int resamples,
                                          std::uint64_t seed, double level = 0.95) {
  if (cells.empty()) throw ConfigError("bootstrap over an empty record set");
  if (resamples < 100) throw ConfigError("bootstrap needs at least 100 resamples");
  SplitMix64 rng(seed);
  std::vector<BinomialCell> scratch(cells.size());
  std::vector<std::vector<double>> samples;
  for (int r = 0; r < resamples; ++r) {
    resample_cells(cells, scratch, rng);
    const std::vector<double> values = statistic(std::span<const BinomialCell>(scratch));
    if (samples.empty()) samples.resize(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) samples[k].push_back(values[k]);
  }
  const double tail = (1.0 - level) / 2.0;
  std::vector<Interval> out;
  for (auto& s : samples) {
    std::sort(s.begin(), s.end());
    out.push_back({quantile_sorted(s, tail), quantile_sorted(s, 1.0 - tail)});
  }
  return out;
}

/// Scalar form: percentile 95% interval of `statistic(cells) -> double`.
template <class Statistic>
Interval bootstrap_ci(std::span<const BinomialCell> cells, Statistic&& statistic, int resamples, std::uint64_t seed,
                      double level = 0.95) {
  return bootstrap_intervals(
             cells, [&](std::span<const BinomialCell> c) { return std::vector<double>{statistic(c)}; }, resamples,
             seed, level)
      .front();
}

/// Wilson score interval for k successes in n trials at normal quantile z.
inline Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z) {
  if (n == 0) throw UsageError("wilson interval with no trials");
  const double nn = static_cast<double>(n);
  const double phat = static_cast<double>(k) / nn;
  const double denom = 1.0 + z * z / nn;
  const double center = (phat + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / nn + z * z / (4.0 * nn * nn)) / denom;
  return {center - half, center + half};
}

}  // namespace depthlab
