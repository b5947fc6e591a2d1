#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "depthlab/cell_set.hpp"
#include "depthlab/errors.hpp"
#include "depthlab/game_types.hpp"
#include "depthlab/symmetry.hpp"

namespace depthlab {

/// The game of Y on a triangular board of side n with hexagonal adjacency.
///
/// Row r (0 at the apex) holds cells (r, 0) .. (r, r). A group wins when it
/// touches the left edge (c == 0), the right edge (c == r) and the bottom
/// edge (r == n - 1); corners count for both of their edges.
class YState {
 public:
  static constexpr GameId kGame = GameId::Y;
  static constexpr int kMinSize = 1;
  static constexpr int kMaxSize = 8;
  static constexpr int kMaxCells = kMaxSize * (kMaxSize + 1) / 2;

  static constexpr std::uint8_t kLeft = 1;
  static constexpr std::uint8_t kRight = 2;
  static constexpr std::uint8_t kBottom = 4;
  static constexpr std::uint8_t kAllSides = kLeft | kRight | kBottom;

  YState() = default;

  static YState initial(int size) {
    if (size < kMinSize || size > kMaxSize)
      throw ConfigError("y size " + std::to_string(size) + " outside 1..8");
    YState s;
    s.size_ = size;
    return s;
  }

  /// Position with the given stones; connectivity and winner are rebuilt.
  static YState from_stones(int size, CellSet black, CellSet white) {
    YState s = initial(size);
    const CellSet board = CellSet::first(s.cell_count());
    if (!(black & white).empty() || !((black | white) & ~board).empty())
      throw ConfigError("overlapping or off-board stones");
    const int nb = black.count();
    const int nw = white.count();
    if (nb != nw && nb != nw + 1) throw ConfigError("stone counts do not alternate");
    std::optional<Color> winner;
    for (Color c : {Color::Black, Color::White}) {
      (c == Color::Black ? black : white).for_each([&](int cell) {
        if (s.place(c, cell) && !winner) winner = c;
      });
    }
    if (winner) {
      // Only one color can ever span the three sides.
      for (Color c : {Color::Black, Color::White})
        if (c != *winner && s.connects_all_sides(c)) throw ConfigError("both colors connect all sides");
    }
    s.winner_ = winner;
    s.move_count_ = nb + nw;
    s.to_move_ = nb == nw ? Color::Black : Color::White;
    return s;
  }

  int size() const { return size_; }
  int cell_count() const { return size_ * (size_ + 1) / 2; }
  Color to_move() const { return to_move_; }
  int move_count() const { return move_count_; }

  static int cell_at(int row, int col) { return row * (row + 1) / 2 + col; }
  int row_of(int cell) const { return geometry(size_).row[static_cast<std::size_t>(cell)]; }
  int col_of(int cell) const { return cell - cell_at(row_of(cell), 0); }

  /// Edge bits (kLeft | kRight | kBottom) touched by a cell.
  std::uint8_t sides_of(int cell) const { return geometry(size_).sides[static_cast<std::size_t>(cell)]; }

  std::vector<int> neighbors(int cell) const {
    const auto& g = geometry(size_);
    const auto& nb = g.neighbors[static_cast<std::size_t>(cell)];
    return {nb.begin(), nb.begin() + g.degree[static_cast<std::size_t>(cell)]};
  }

  CellSet stones(Color c) const { return stones_[static_cast<std::size_t>(index_of(c))]; }
  CellSet empty_cells() const { return CellSet::first(cell_count()) & ~(stones_[0] | stones_[1]); }

  std::optional<Color> stone_at(int cell) const {
    if (stones_[0].test(cell)) return Color::Black;
    if (stones_[1].test(cell)) return Color::White;
    return std::nullopt;
  }

  /// Every empty cell while the game is running, nothing once it is won.
  CellSet legal_mask() const { return winner_ ? CellSet{} : empty_cells(); }

  /// Empty cells in row-major order. Throws UsageError on a finished game.
  std::vector<Move> legal_moves() const {
    if (winner_) throw UsageError("legal_moves on a finished game");
    std::vector<Move> out;
    empty_cells().for_each([&](int c) { out.push_back(Move{c}); });
    return out;
  }

  bool is_legal(Move m) const { return m.cell >= 0 && m.cell < cell_count() && legal_mask().test(m.cell); }
  std::optional<Color> winner() const { return winner_; }
  bool is_terminal() const { return winner_.has_value(); }

  YState play(Move m) const {
    if (m.cell < 0 || m.cell >= cell_count())
      throw RuleViolation(Rule::OffBoard, "cell " + std::to_string(m.cell));
    if (stone_at(m.cell)) throw RuleViolation(Rule::Occupied, cell_name(m.cell));
    if (winner_) throw UsageError("play on a finished game");
    YState next = *this;
    next.apply(m);
    return next;
  }

  void apply(Move m) {
    if (place(to_move_, m.cell)) winner_ = to_move_;
    to_move_ = opponent(to_move_);
    ++move_count_;
  }

  YState transformed(const Symmetry& g) const {
    YState s = from_stones(size_, g(stones_[0]), g(stones_[1]));
    s.to_move_ = to_move_;
    s.move_count_ = move_count_;
    return s;
  }

  static SymmetryGroup symmetries(int size) { return triangle_symmetries(size); }

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
    if (row < 0 || row >= size_ || col < 0 || col > row)
      throw ConfigError("cell '" + std::string(name) + "' is off the board");
    return cell_at(row, col);
  }

  std::string diagram() const {
    std::string out;
    for (int r = 0; r < size_; ++r) {
      out += std::to_string(r + 1);
      out += std::string(static_cast<std::size_t>(size_ - r + (r + 1 < 10 ? 1 : 0)), ' ');
      for (int c = 0; c <= r; ++c) {
        const auto stone = stone_at(cell_at(r, c));
        out += !stone ? '.' : (*stone == Color::Black ? 'X' : 'O');
        out += ' ';
      }
      out.back() = '\n';
    }
    return out;
  }

  /// Positions compare by stones and side to move; union-find layout is an
  /// implementation detail.
  friend bool operator==(const YState& a, const YState& b) {
    return a.size_ == b.size_ && a.to_move_ == b.to_move_ && a.move_count_ == b.move_count_ &&
           a.stones_ == b.stones_ && a.winner_ == b.winner_;
  }

 private:
  struct Geometry {
    std::array<std::array<std::int8_t, 6>, kMaxCells> neighbors{};
    std::array<std::int8_t, kMaxCells> degree{};
    std::array<std::uint8_t, kMaxCells> sides{};
    std::array<std::int8_t, kMaxCells> row{};
  };

  static const Geometry& geometry(int n) {
    static const std::array<Geometry, kMaxSize + 1> table = [] {
      std::array<Geometry, kMaxSize + 1> t{};
      for (int size = 1; size <= kMaxSize; ++size) {
        Geometry& g = t[static_cast<std::size_t>(size)];
        for (int r = 0; r < size; ++r)
          for (int c = 0; c <= r; ++c) {
            const auto cell = static_cast<std::size_t>(cell_at(r, c));
            g.row[cell] = static_cast<std::int8_t>(r);
            g.sides[cell] = static_cast<std::uint8_t>((c == 0 ? kLeft : 0) | (c == r ? kRight : 0) |
                                                      (r == size - 1 ? kBottom : 0));
            const int dr[6] = {-1, -1, 0, 0, 1, 1};
            const int dc[6] = {-1, 0, -1, 1, 0, 1};
            for (int k = 0; k < 6; ++k) {
              const int r2 = r + dr[k];
              const int c2 = c + dc[k];
              if (r2 < 0 || r2 >= size || c2 < 0 || c2 > r2) continue;
              g.neighbors[cell][static_cast<std::size_t>(g.degree[cell]++)] = static_cast<std::int8_t>(cell_at(r2, c2));
            }
          }
      }
      return t;
    }();
    return table[static_cast<std::size_t>(n)];
  }

  int find(int cell) const {
    while (parent_[static_cast<std::size_t>(cell)] != cell) cell = parent_[static_cast<std::size_t>(cell)];
    return cell;
  }

  /// Adds a stone and merges it with adjacent friendly groups; returns true
  /// when the merged group touches all three sides.
  bool place(Color c, int cell) {
    const auto& g = geometry(size_);
    const auto idx = static_cast<std::size_t>(cell);
    stones_[static_cast<std::size_t>(index_of(c))].set(cell);
    parent_[idx] = static_cast<std::int8_t>(cell);
    side_mask_[idx] = g.sides[idx];
    const CellSet own = stones(c);
    int root = cell;
    for (int k = 0; k < g.degree[idx]; ++k) {
      const int nb = g.neighbors[idx][static_cast<std::size_t>(k)];
      if (!own.test(nb)) continue;
      const int other = find(nb);
      if (other == root) continue;
      parent_[static_cast<std::size_t>(other)] = static_cast<std::int8_t>(root);
      side_mask_[static_cast<std::size_t>(root)] |= side_mask_[static_cast<std::size_t>(other)];
    }
    // Path compression keeps later finds short.
    for (int k = 0; k < g.degree[idx]; ++k) {
      const int nb = g.neighbors[idx][static_cast<std::size_t>(k)];
      if (own.test(nb)) parent_[static_cast<std::size_t>(nb)] = static_cast<std::int8_t>(root);
    }
    return side_mask_[static_cast<std::size_t>(root)] == kAllSides;
  }

  bool connects_all_sides(Color c) const {
    bool found = false;
    stones(c).for_each([&](int cell) {
      if (find(cell) == cell && side_mask_[static_cast<std::size_t>(cell)] == kAllSides) found = true;
    });
    return found;
  }

  int size_ = 0;
  Color to_move_ = Color::Black;
  int move_count_ = 0;
  std::array<CellSet, 2> stones_{};
  std::optional<Color> winner_;
  std::array<std::int8_t, kMaxCells> parent_{};
  std::array<std::uint8_t, kMaxCells> side_mask_{};
};

}  // namespace depthlab
