#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "depthlab/cell_set.hpp"
#include "depthlab/errors.hpp"
#include "depthlab/game.hpp"
#include "depthlab/player_spec.hpp"
#include "depthlab/rng.hpp"

namespace depthlab {

/// A playing agent: a PlayerSpec plus its private random stream.
///
/// MCTS agents run plain UCT. Each iteration descends by
/// mean + c * sqrt(ln N / n), expands the lowest-numbered untried move,
/// finishes the game with uniform random moves and credits a win to every
/// node whose move was made by the winner. The decision is the most visited
/// root child; every tie resolves to the lower cell index.
class Agent {
 public:
  Agent(PlayerSpec spec, std::uint64_t seed) : spec_(std::move(spec)), rng_(seed) { spec_.validate(); }

  const PlayerSpec& spec() const { return spec_; }

  /// Playouts run by the last select_move call.
  std::uint64_t last_playouts() const { return last_playouts_; }

  template <GameState S>
  Move select_move(const S& s) {
    const CellSet legal = s.legal_mask();
    if (legal.empty()) throw UsageError("select_move on a finished game");
    last_playouts_ = 0;
    if (spec_.kind == AgentKind::Random) return Move{legal.nth(static_cast<int>(rng_.bounded(static_cast<std::uint64_t>(legal.count()))))};
    return search(s, legal);
  }

 private:
  struct Node {
    Move move;
    Color mover;  // who played `move`
    int parent;
    CellSet untried;
    std::vector<int> children;
    std::uint32_t visits = 0;
    double wins = 0.0;
  };

  template <GameState S>
  Move search(const S& root_state, CellSet legal) {
    nodes_.clear();
    nodes_.reserve(static_cast<std::size_t>(spec_.simulations) + 1);
    nodes_.push_back(Node{Move{}, opponent(root_state.to_move()), -1, legal, {}});

    for (int it = 0; it < spec_.simulations; ++it) {
      S state = root_state;
      int idx = 0;
      while (nodes_[static_cast<std::size_t>(idx)].untried.empty() &&
             !nodes_[static_cast<std::size_t>(idx)].children.empty()) {
        idx = best_child(idx);
        state.apply(nodes_[static_cast<std::size_t>(idx)].move);
      }
      if (Node& leaf = nodes_[static_cast<std::size_t>(idx)]; !leaf.untried.empty()) {
        const Move m{leaf.untried.lowest()};
        leaf.untried.reset(m.cell);
        const Color mover = state.to_move();
        state.apply(m);
        const int child = static_cast<int>(nodes_.size());
        leaf.children.push_back(child);
        nodes_.push_back(Node{m, mover, idx, state.legal_mask(), {}});
        idx = child;
      }
      const Color winner = playout(std::move(state));
      ++last_playouts_;
      for (int i = idx; i >= 0; i = nodes_[static_cast<std::size_t>(i)].parent) {
        Node& n = nodes_[static_cast<std::size_t>(i)];
        ++n.visits;
        if (n.mover == winner) n.wins += 1.0;
      }
    }

    const Node& root = nodes_.front();
    int best = root.children.front();
    for (int c : root.children)
      if (nodes_[static_cast<std::size_t>(c)].visits > nodes_[static_cast<std::size_t>(best)].visits) best = c;
    return nodes_[static_cast<std::size_t>(best)].move;
  }

  int best_child(int idx) const {
    const Node& node = nodes_[static_cast<std::size_t>(idx)];
    const double log_n = std::log(static_cast<double>(node.visits));
    int best = -1;
    double best_score = 0.0;
    for (int c : node.children) {
      const Node& child = nodes_[static_cast<std::size_t>(c)];
      const double n = child.visits;
      const double score = child.wins / n + spec_.exploration * std::sqrt(log_n / n);
      if (best < 0 || score > best_score) {
        best = c;
        best_score = score;
      }
    }
    return best;
  }

  template <GameState S>
  Color playout(S state) {
    for (;;) {
      const CellSet legal = state.legal_mask();
      if (legal.empty()) return *state.winner();
      state.apply(Move{legal.nth(static_cast<int>(rng_.bounded(static_cast<std::uint64_t>(legal.count()))))});
    }
  }

  PlayerSpec spec_;
  SplitMix64 rng_;
  std::uint64_t last_playouts_ = 0;
  std::vector<Node> nodes_;
};

}  // namespace depthlab
