#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "depthlab/errors.hpp"

namespace depthlab {

enum class Color : std::uint8_t { Black = 0, White = 1 };

constexpr Color opponent(Color c) { return c == Color::Black ? Color::White : Color::Black; }
constexpr int index_of(Color c) { return static_cast<int>(c); }

inline std::string_view to_string(Color c) { return c == Color::Black ? "black" : "white"; }

inline Color parse_color(std::string_view s) {
  if (s == "black" || s == "B" || s == "b") return Color::Black;
  if (s == "white" || s == "W" || s == "w") return Color::White;
  throw ConfigError("unknown color '" + std::string(s) + "'");
}

/// A stone placement. Cells are numbered row-major from the top-left corner.
struct Move {
  int cell = -1;
  friend constexpr auto operator<=>(const Move&, const Move&) = default;
};

enum class GameId { NoGo, Y };

inline std::string_view to_string(GameId g) { return g == GameId::NoGo ? "nogo" : "y"; }

inline GameId parse_game(std::string_view s) {
  if (s == "nogo") return GameId::NoGo;
  if (s == "y") return GameId::Y;
  throw ConfigError("unsupported game '" + std::string(s) + "' (expected nogo or y)");
}

/// Column letter + 1-based row, e.g. "c3".
inline std::string cell_label(int row, int col) {
  return std::string(1, static_cast<char>('a' + col)) + std::to_string(row + 1);
}

}  // namespace depthlab
