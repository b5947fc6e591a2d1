#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depthlab/cell_set.hpp"
#include "depthlab/errors.hpp"
#include "depthlab/game_types.hpp"
#include "depthlab/symmetry.hpp"

namespace depthlab {

/// NoGo on an n x n grid: Go placement without captures. Placing a stone that
/// removes the last liberty of any group (either color) is illegal, and the
/// player to move with no legal placement loses. There are no passes.
class NoGoState {
 public:
  static constexpr GameId kGame = GameId::NoGo;
  static constexpr int kMinSize = 1;
  static constexpr int kMaxSize = 9;

  NoGoState() = default;

  static NoGoState initial(int size) {
    if (size < kMinSize || size > kMaxSize)
      throw ConfigError("nogo size " + std::to_string(size) + " outside 1..9");
    NoGoState s;
    s.size_ = size;
    return s;
  }

  /// Position with the given stones. Throws ConfigError when a group has no
  /// liberty or the stone counts cannot arise from alternating play.
  static NoGoState from_stones(int size, CellSet black, CellSet white) {
    NoGoState s = initial(size);
    const CellSet board = geometry(size).board;
    if (!(black & white).empty() || !((black | white) & ~board).empty())
      throw ConfigError("overlapping or off-board stones");
    const int nb = black.count();
    const int nw = white.count();
    if (nb != nw && nb != nw + 1) throw ConfigError("stone counts do not alternate");
    s.stones_ = {black, white};
    s.move_count_ = nb + nw;
    s.to_move_ = nb == nw ? Color::Black : Color::White;
    const CellSet empty = s.empty_cells();
    for (CellSet own : s.stones_) {
      for (CellSet rest = own; !rest.empty();) {
        const CellSet group = s.flood(CellSet::single(rest.lowest()), own);
        if ((s.dilate(group) & empty).empty()) throw ConfigError("group without liberties");
        rest &= ~group;
      }
    }
    return s;
  }

  int size() const { return size_; }
  int cell_count() const { return size_ * size_; }
  Color to_move() const { return to_move_; }
  int move_count() const { return move_count_; }

  int row_of(int cell) const { return cell / size_; }
  int col_of(int cell) const { return cell % size_; }
  int cell_at(int row, int col) const { return row * size_ + col; }

  CellSet stones(Color c) const { return stones_[static_cast<std::size_t>(index_of(c))]; }
  CellSet empty_cells() const { return geometry(size_).board & ~(stones_[0] | stones_[1]); }

  std::optional<Color> stone_at(int cell) const {
    if (stones_[0].test(cell)) return Color::Black;
    if (stones_[1].test(cell)) return Color::White;
    return std::nullopt;
  }

  /// Legal placements for the player to move. Empty exactly when the game
  /// is over.
  CellSet legal_mask() const {
    const CellSet own = stones(to_move_);
    const CellSet opp = stones(opponent(to_move_));
    const CellSet empty = empty_cells();
    CellSet forbidden;  // last liberty of an opponent group
    CellSet supported;  // liberties of own groups that keep another liberty
    for (CellSet rest = opp; !rest.empty();) {
      const CellSet group = flood(CellSet::single(rest.lowest()), opp);
      const CellSet libs = dilate(group) & empty;
      if (libs.count() == 1) forbidden |= libs;
      rest &= ~group;
    }
    for (CellSet rest = own; !rest.empty();) {
      const CellSet group = flood(CellSet::single(rest.lowest()), own);
      const CellSet libs = dilate(group) & empty;
      if (libs.count() >= 2) supported |= libs;
      rest &= ~group;
    }
    return empty & ~forbidden & (dilate(empty) | supported);
  }

  /// Legal moves in row-major order. A finished NoGo position simply has
  /// none, which is how the loss condition is expressed.
  std::vector<Move> legal_moves() const {
    std::vector<Move> out;
    legal_mask().for_each([&](int c) { out.push_back(Move{c}); });
    return out;
  }

  bool is_legal(Move m) const { return m.cell >= 0 && m.cell < cell_count() && legal_mask().test(m.cell); }

  std::optional<Color> winner() const {
    if (legal_mask().empty()) return opponent(to_move_);
    return std::nullopt;
  }

  bool is_terminal() const { return legal_mask().empty(); }

  /// Checked placement. Throws RuleViolation naming the broken rule.
  NoGoState play(Move m) const {
    if (m.cell < 0 || m.cell >= cell_count())
      throw RuleViolation(Rule::OffBoard, "cell " + std::to_string(m.cell));
    if (stone_at(m.cell)) throw RuleViolation(Rule::Occupied, cell_name(m.cell));
    NoGoState next = *this;
    next.apply(m);
    const CellSet placed = next.stones(to_move_);
    const CellSet opp = next.stones(opponent(to_move_));
    const CellSet empty = next.empty_cells();
    const CellSet adjacent_opp = dilate(CellSet::single(m.cell)) & opp;
    for (CellSet rest = adjacent_opp; !rest.empty();) {
      const CellSet group = flood(CellSet::single(rest.lowest()), opp);
      if ((dilate(group) & empty).empty()) throw RuleViolation(Rule::Capture, cell_name(m.cell));
      rest &= ~group;
    }
    const CellSet own_group = flood(CellSet::single(m.cell), placed);
    if ((dilate(own_group) & empty).empty()) throw RuleViolation(Rule::Suicide, cell_name(m.cell));
    return next;
  }

  /// Unchecked placement; the move must be legal.
  void apply(Move m) {
    stones_[static_cast<std::size_t>(index_of(to_move_))].set(m.cell);
    to_move_ = opponent(to_move_);
    ++move_count_;
  }

  NoGoState transformed(const Symmetry& g) const {
    NoGoState s = *this;
    s.stones_ = {g(stones_[0]), g(stones_[1])};
    return s;
  }

  static SymmetryGroup symmetries(int size) { return square_symmetries(size); }

  std::string cell_name(int cell) const { return cell_label(row_of(cell), col_of(cell)); }

  int parse_cell(std::string_view name) const {
    if (name.size() < 2) throw ConfigError("bad cell name '" + std::string(name) + "'");
    const int col = name[0] - 'a';
    int row = 0;
    for (char ch : name.substr(1)) {
      if (ch < '0' || ch > '9') throw ConfigError("bad cell name '" + std::string(name) + "'");
      row = row * 10 + (ch - '0');
    }
    row -= 1;
    if (row < 0 || row >= size_ || col < 0 || col >= size_)
      throw ConfigError("cell '" + std::string(name) + "' is off the board");
    return cell_at(row, col);
  }

  /// Monospace diagram; X = black, O = white, rows numbered from the top.
  std::string diagram() const {
    std::string out = "  ";
    for (int c = 0; c < size_; ++c) {
      out += ' ';
      out += static_cast<char>('a' + c);
    }
    out += '\n';
    for (int r = 0; r < size_; ++r) {
      out += std::to_string(r + 1);
      if (r + 1 < 10) out += ' ';
      for (int c = 0; c < size_; ++c) {
        const auto stone = stone_at(cell_at(r, c));
        out += ' ';
        out += !stone ? '.' : (*stone == Color::Black ? 'X' : 'O');
      }
      out += '\n';
    }
    return out;
  }

  friend bool operator==(const NoGoState&, const NoGoState&) = default;

 private:
  struct Geometry {
    CellSet board;
    CellSet not_left;
    CellSet not_right;
  };

  static const Geometry& geometry(int n) {
    static const std::array<Geometry, kMaxSize + 1> table = [] {
      std::array<Geometry, kMaxSize + 1> t{};
      for (int size = 1; size <= kMaxSize; ++size) {
        Geometry g;
        g.board = CellSet::first(size * size);
        for (int r = 0; r < size; ++r) {
          g.not_left.set(r * size + size - 1);
          g.not_right.set(r * size);
          for (int c = 1; c + 1 < size; ++c) {
            g.not_left.set(r * size + c);
            g.not_right.set(r * size + c);
          }
        }
        // On a 1-wide board both edges coincide.
        if (size == 1) g.not_left = g.not_right = CellSet{};
        t[static_cast<std::size_t>(size)] = g;
      }
      return t;
    }();
    return table[static_cast<std::size_t>(n)];
  }

  /// Orthogonal neighbours of a set of cells.
  CellSet dilate(CellSet s) const {
    const Geometry& g = geometry(size_);
    return (((s & g.not_right) << 1) | ((s & g.not_left) >> 1) | (s << size_) | (s >> size_)) & g.board;
  }

  CellSet flood(CellSet seed, CellSet within) const {
    CellSet group = seed;
    for (;;) {
      const CellSet next = (group | dilate(group)) & within;
      if (next == group) return group;
      group = next;
    }
  }

  int size_ = 0;
  Color to_move_ = Color::Black;
  int move_count_ = 0;
  std::array<CellSet, 2> stones_{};
};

}  // namespace depthlab
