#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "depthlab/errors.hpp"
#include "depthlab/winrate_table.hpp"

namespace depthlab::fixtures {

// Artificial two-opening games; every value is the stronger player's
// winrate, exact (zero counts).

/// The pie rule lowers the stronger player's rate from 0.95 to 0.90.
inline WinrateTable table3a() {
  return {"1", "2", {{"A", 1.00, 0.90, 0, 0}, {"B", 0.50, 0.90, 0, 0}}};
}

/// Opening B is crushing for Black; the pie rule lifts 0.50005 to 0.75.
inline WinrateTable table3b() {
  return {"1", "2", {{"A", 1.00, 0.50, 0, 0}, {"B", 1.00, 0.0001, 0, 0}}};
}

/// Three players where the pie rule beats every fixed opening. Weakest pair
/// first: {2 vs 3, 1 vs 2}.
inline std::vector<WinrateTable> table3c() {
  return {
      {"2", "3", {{"A", 0.37, 0.67, 0, 0}, {"B", 0.68, 0.94, 0, 0}}},
      {"1", "2", {{"A", 0.96, 0.99, 0, 0}, {"B", 0.71, 0.95, 0, 0}}},
  };
}

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> n{"table3a", "table3b", "table3c"};
  return n;
}

/// Named fixture as a pool (single-table fixtures yield a pool of one).
inline std::vector<WinrateTable> by_name(std::string_view name) {
  if (name == "table3a") return {table3a()};
  if (name == "table3b") return {table3b()};
  if (name == "table3c") return table3c();
  throw ConfigError("unknown fixture '" + std::string(name) + "' (table3a, table3b, table3c)");
}

}  // namespace depthlab::fixtures
