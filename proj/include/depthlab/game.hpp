#pragma once

#include <concepts>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "depthlab/cell_set.hpp"
#include "depthlab/errors.hpp"
#include "depthlab/game_types.hpp"
#include "depthlab/nogo.hpp"
#include "depthlab/symmetry.hpp"
#include "depthlab/y.hpp"

namespace depthlab {

/// Two-player, perfect-information, draw-free placement game. States are
/// values: play() returns a new state, apply() mutates in place for search.
template <class S>
concept GameState = std::copyable<S> && std::equality_comparable<S> &&
    requires(const S cs, S s, Move m, const Symmetry& g, int n) {
      { S::kGame } -> std::convertible_to<GameId>;
      { S::initial(n) } -> std::same_as<S>;
      { S::symmetries(n) } -> std::same_as<SymmetryGroup>;
      { S::from_stones(n, CellSet{}, CellSet{}) } -> std::same_as<S>;
      { cs.size() } -> std::same_as<int>;
      { cs.cell_count() } -> std::same_as<int>;
      { cs.to_move() } -> std::same_as<Color>;
      { cs.move_count() } -> std::same_as<int>;
      { cs.stones(Color::Black) } -> std::same_as<CellSet>;
      { cs.legal_mask() } -> std::same_as<CellSet>;
      { cs.legal_moves() } -> std::same_as<std::vector<Move>>;
      { cs.winner() } -> std::same_as<std::optional<Color>>;
      { cs.play(m) } -> std::same_as<S>;
      { s.apply(m) };
      { cs.transformed(g) } -> std::same_as<S>;
      { cs.cell_name(n) } -> std::same_as<std::string>;
      { cs.parse_cell(std::string_view{}) } -> std::same_as<int>;
      { cs.diagram() } -> std::same_as<std::string>;
    };

static_assert(GameState<NoGoState>);
static_assert(GameState<YState>);

using AnyState = std::variant<NoGoState, YState>;

/// Calls f(std::type_identity<State>{}) for the state type of a game id.
template <class F>
decltype(auto) visit_game(GameId game, F&& f) {
  switch (game) {
    case GameId::NoGo: return std::forward<F>(f)(std::type_identity<NoGoState>{});
    case GameId::Y: return std::forward<F>(f)(std::type_identity<YState>{});
  }
  throw ConfigError("unknown game id");
}

inline AnyState initial_state(GameId game, int size) {
  return visit_game(game, [&]<class S>(std::type_identity<S>) -> AnyState { return S::initial(size); });
}

inline SymmetryGroup symmetry_group(GameId game, int size) {
  return visit_game(game, [&]<class S>(std::type_identity<S>) {
    S::initial(size);  // validates the size
    return S::symmetries(size);
  });
}

template <GameState S>
S apply_symmetry(const S& s, const Symmetry& g) {
  return s.transformed(g);
}

/// First-move candidates for an experiment. NoGo: the smallest cell of each
/// orbit under the 8 square symmetries. Y: every cell.
inline std::vector<Move> canonical_openings(GameId game, int size) {
  const SymmetryGroup group = symmetry_group(game, size);
  std::vector<Move> out;
  if (game == GameId::Y) {
    for (int c = 0; c < size * (size + 1) / 2; ++c) out.push_back(Move{c});
    return out;
  }
  for (const auto& orbit : group.orbits()) out.push_back(Move{orbit.front()});
  return out;
}

/// Compact text form "<game>/<size>/<B|W>/<cells>", cells row-major with
/// 'B', 'W' or '.'.
template <GameState S>
std::string to_compact(const S& s) {
  std::string out = std::string(to_string(S::kGame)) + "/" + std::to_string(s.size()) + "/" +
                    (s.to_move() == Color::Black ? "B" : "W") + "/";
  for (int c = 0; c < s.cell_count(); ++c) {
    out += s.stones(Color::Black).test(c) ? 'B' : s.stones(Color::White).test(c) ? 'W' : '.';
  }
  return out;
}

template <GameState S>
S from_compact(std::string_view text) {
  auto next_field = [&text]() {
    const auto slash = text.find('/');
    std::string_view field = text.substr(0, slash);
    text = slash == std::string_view::npos ? std::string_view{} : text.substr(slash + 1);
    return field;
  };
  const auto game = next_field();
  const auto size_text = next_field();
  const auto mover = next_field();
  const auto cells = next_field();
  if (parse_game(game) != S::kGame) throw ConfigError("compact state is for another game");
  int size = 0;
  for (char ch : size_text) {
    if (ch < '0' || ch > '9') throw ConfigError("bad size in compact state");
    size = size * 10 + (ch - '0');
  }
  S probe = S::initial(size);
  if (static_cast<int>(cells.size()) != probe.cell_count()) throw ConfigError("cell list has wrong length");
  CellSet black, white;
  for (int c = 0; c < probe.cell_count(); ++c) {
    const char ch = cells[static_cast<std::size_t>(c)];
    if (ch == 'B') black.set(c);
    else if (ch == 'W') white.set(c);
    else if (ch != '.') throw ConfigError("bad cell character in compact state");
  }
  S s = S::from_stones(size, black, white);
  if (mover != (s.to_move() == Color::Black ? "B" : "W")) throw ConfigError("side to move does not match stone counts");
  return s;
}

}  // namespace depthlab
