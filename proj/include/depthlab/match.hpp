#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "depthlab/agent.hpp"
#include "depthlab/errors.hpp"
#include "depthlab/game.hpp"
#include "depthlab/player_spec.hpp"
#include "depthlab/rng.hpp"

namespace depthlab {

/// Identifies one game of an experiment: pair index, opening slot (-1 for a
/// free opening), color of the stronger player, repetition index.
struct CellKey {
  int pair = 0;
  int opening = -1;
  bool strong_black = true;
  int index = 0;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct MatchRecord {
  GameId game = GameId::NoGo;
  int size = 0;
  std::string strong;  // pair labels; for a standalone match strong = black
  std::string weak;
  std::string opening = "free";
  std::string black;
  std::string white;
  Color winner = Color::Black;
  std::vector<Move> moves;  // includes a pre-played opening
  std::uint64_t seed = 0;
  std::optional<CellKey> cell;
  std::string config_hash;

  bool strong_won() const {
    const bool strong_black = cell ? cell->strong_black : black == strong;
    return (winner == Color::Black) == strong_black;
  }

  friend bool operator==(const MatchRecord&, const MatchRecord&) = default;
};

/// One full game. A given opening is placed as Black's first move before
/// White's agent acts. The agents are seeded from derive_seed(seed, 1) and
/// derive_seed(seed, 2).
template <GameState S>
MatchRecord play_match(int size, const PlayerSpec& black, const PlayerSpec& white, std::optional<Move> opening,
                       std::uint64_t seed) {
  S state = S::initial(size);
  MatchRecord rec;
  rec.game = S::kGame;
  rec.size = size;
  rec.strong = black.label;
  rec.weak = white.label;
  rec.black = black.label;
  rec.white = white.label;
  rec.seed = seed;
  if (opening) {
    if (opening->cell < 0 || opening->cell >= state.cell_count() || !state.legal_mask().test(opening->cell))
      throw ConfigError("opening " + std::to_string(opening->cell) + " is not legal in the initial position");
    rec.opening = state.cell_name(opening->cell);
    state.apply(*opening);
    rec.moves.push_back(*opening);
  }
  Agent black_agent(black, derive_seed(seed, 1));
  Agent white_agent(white, derive_seed(seed, 2));
  for (;;) {
    const CellSet legal = state.legal_mask();
    if (legal.empty()) break;
    Agent& agent = state.to_move() == Color::Black ? black_agent : white_agent;
    const Move m = agent.select_move(state);
    state.apply(m);
    rec.moves.push_back(m);
  }
  rec.winner = *state.winner();
  return rec;
}

/// Replays the move list with rule checking; true when every move is legal,
/// the game ends exactly at the last move and the winner matches.
template <GameState S>
bool replay_matches(const MatchRecord& rec) {
  try {
    S state = S::initial(rec.size);
    for (const Move m : rec.moves) {
      if (state.legal_mask().empty()) return false;
      state = state.play(m);
    }
    const auto w = state.winner();
    return w && *w == rec.winner;
  } catch (const std::exception&) {
    return false;
  }
}

inline bool replay_matches(const MatchRecord& rec) {
  return visit_game(rec.game, [&]<class S>(std::type_identity<S>) { return replay_matches<S>(rec); });
}

inline nlohmann::json to_json_line(const MatchRecord& r) {
  nlohmann::json moves = nlohmann::json::array();
  visit_game(r.game, [&]<class S>(std::type_identity<S>) {
    const S probe = S::initial(r.size);
    for (const Move m : r.moves) moves.push_back(probe.cell_name(m.cell));
  });
  nlohmann::json j{{"pair", {r.strong, r.weak}},
                   {"opening", r.opening},
                   {"colors", {{"black", r.black}, {"white", r.white}}},
                   {"winner", to_string(r.winner)},
                   {"moves", moves},
                   {"seed", r.seed},
                   {"game", to_string(r.game)},
                   {"size", r.size}};
  if (r.cell) {
    j["cell"] = {{"pair", r.cell->pair},
                 {"opening", r.cell->opening},
                 {"strong_black", r.cell->strong_black},
                 {"index", r.cell->index}};
  }
  if (!r.config_hash.empty()) j["config"] = r.config_hash;
  return j;
}

inline MatchRecord from_json_line(const nlohmann::json& j) {
  MatchRecord r;
  r.game = parse_game(j.at("game").get<std::string>());
  r.size = j.at("size").get<int>();
  const auto pair = j.at("pair").get<std::vector<std::string>>();
  if (pair.size() != 2) throw ConfigError("record pair must hold two labels");
  r.strong = pair[0];
  r.weak = pair[1];
  r.opening = j.at("opening").get<std::string>();
  r.black = j.at("colors").at("black").get<std::string>();
  r.white = j.at("colors").at("white").get<std::string>();
  r.winner = parse_color(j.at("winner").get<std::string>());
  r.seed = j.at("seed").get<std::uint64_t>();
  visit_game(r.game, [&]<class S>(std::type_identity<S>) {
    const S probe = S::initial(r.size);
    for (const auto& name : j.at("moves")) r.moves.push_back(Move{probe.parse_cell(name.get<std::string>())});
  });
  if (j.contains("cell")) {
    const auto& c = j.at("cell");
    r.cell = CellKey{c.at("pair").get<int>(), c.at("opening").get<int>(), c.at("strong_black").get<bool>(),
                     c.at("index").get<int>()};
  }
  r.config_hash = j.value("config", std::string{});
  return r;
}

}  // namespace depthlab
