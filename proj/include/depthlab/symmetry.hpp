#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "depthlab/cell_set.hpp"
#include "depthlab/game_types.hpp"

namespace depthlab {

/// A board automorphism stored as a cell permutation.
class Symmetry {
 public:
  Symmetry() = default;
  Symmetry(std::string name, std::vector<int> image) : name_(std::move(name)), image_(std::move(image)) {}

  static Symmetry identity(int cells) {
    std::vector<int> image(static_cast<std::size_t>(cells));
    for (int i = 0; i < cells; ++i) image[static_cast<std::size_t>(i)] = i;
    return {"identity", std::move(image)};
  }

  const std::string& name() const { return name_; }
  int cell_count() const { return static_cast<int>(image_.size()); }
  int operator()(int cell) const { return image_[static_cast<std::size_t>(cell)]; }
  Move operator()(Move m) const { return Move{(*this)(m.cell)}; }

  CellSet operator()(CellSet cells) const {
    CellSet out;
    cells.for_each([&](int c) { out.set((*this)(c)); });
    return out;
  }

  /// (a * b)(x) = a(b(x)).
  friend Symmetry operator*(const Symmetry& a, const Symmetry& b) {
    std::vector<int> image(b.image_.size());
    for (std::size_t i = 0; i < image.size(); ++i) image[i] = a(b.image_[i]);
    return {a.name_ + "*" + b.name_, std::move(image)};
  }

  bool is_bijection() const {
    std::vector<bool> seen(image_.size(), false);
    for (int c : image_) {
      if (c < 0 || c >= cell_count() || seen[static_cast<std::size_t>(c)]) return false;
      seen[static_cast<std::size_t>(c)] = true;
    }
    return true;
  }

  bool is_identity() const {
    for (std::size_t i = 0; i < image_.size(); ++i)
      if (image_[i] != static_cast<int>(i)) return false;
    return true;
  }

  const std::vector<int>& image() const { return image_; }

  /// Equality compares the permutation only.
  friend bool operator==(const Symmetry& a, const Symmetry& b) { return a.image_ == b.image_; }

 private:
  std::string name_;
  std::vector<int> image_;
};

class SymmetryGroup {
 public:
  SymmetryGroup() = default;
  explicit SymmetryGroup(std::vector<Symmetry> elements) : elements_(std::move(elements)) {}

  const std::vector<Symmetry>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  const Symmetry& operator[](std::size_t i) const { return elements_[i]; }

  bool contains(const Symmetry& s) const {
    return std::find(elements_.begin(), elements_.end(), s) != elements_.end();
  }

  bool has_identity() const {
    return std::any_of(elements_.begin(), elements_.end(), [](const Symmetry& s) { return s.is_identity(); });
  }

  bool is_closed() const {
    for (const auto& a : elements_)
      for (const auto& b : elements_)
        if (!contains(a * b)) return false;
    return true;
  }

  /// Orbits of the cells, each sorted ascending; orbits ordered by their
  /// smallest cell.
  std::vector<std::vector<int>> orbits() const {
    if (elements_.empty()) return {};
    const int cells = elements_.front().cell_count();
    std::vector<int> owner(static_cast<std::size_t>(cells), -1);
    std::vector<std::vector<int>> out;
    for (int c = 0; c < cells; ++c) {
      if (owner[static_cast<std::size_t>(c)] >= 0) continue;
      std::vector<int> orbit;
      for (const auto& g : elements_) orbit.push_back(g(c));
      std::sort(orbit.begin(), orbit.end());
      orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
      for (int o : orbit) owner[static_cast<std::size_t>(o)] = static_cast<int>(out.size());
      out.push_back(std::move(orbit));
    }
    return out;
  }

 private:
  std::vector<Symmetry> elements_;
};

/// The 8 automorphisms of the n x n grid (dihedral group D4).
inline SymmetryGroup square_symmetries(int n) {
  const int m = n - 1;
  using Map = std::pair<int, int> (*)(int, int, int);
  const std::pair<const char*, Map> maps[] = {
      {"identity", [](int r, int c, int) { return std::pair{r, c}; }},
      {"rot90", [](int r, int c, int m) { return std::pair{c, m - r}; }},
      {"rot180", [](int r, int c, int m) { return std::pair{m - r, m - c}; }},
      {"rot270", [](int r, int c, int m) { return std::pair{m - c, r}; }},
      {"mirror", [](int r, int c, int m) { return std::pair{r, m - c}; }},
      {"flip", [](int r, int c, int m) { return std::pair{m - r, c}; }},
      {"transpose", [](int r, int c, int) { return std::pair{c, r}; }},
      {"antitranspose", [](int r, int c, int m) { return std::pair{m - c, m - r}; }},
  };
  std::vector<Symmetry> out;
  for (const auto& [name, map] : maps) {
    std::vector<int> image(static_cast<std::size_t>(n * n));
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        const auto [r2, c2] = map(r, c, m);
        image[static_cast<std::size_t>(r * n + c)] = r2 * n + c2;
      }
    out.emplace_back(name, std::move(image));
  }
  return SymmetryGroup(std::move(out));
}

/// The 6 automorphisms of a side-n triangular board (dihedral group D3).
///
/// Cell (r, c), 0 <= c <= r < n, has side distances (c, r - c, n - 1 - r) to
/// the left, right and bottom edges; every symmetry permutes those three
/// distances.
inline SymmetryGroup triangle_symmetries(int n) {
  const int m = n - 1;
  const int perms[6][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}, {0, 2, 1}, {2, 1, 0}};
  const char* names[6] = {"identity", "rot120", "rot240", "reflect-bottom", "reflect-left", "reflect-right"};
  std::vector<Symmetry> out;
  for (int k = 0; k < 6; ++k) {
    std::vector<int> image(static_cast<std::size_t>(n * (n + 1) / 2));
    for (int r = 0; r < n; ++r)
      for (int c = 0; c <= r; ++c) {
        const int dist[3] = {c, r - c, m - r};
        const int a = dist[perms[k][0]];
        const int d = dist[perms[k][2]];
        const int r2 = m - d;
        const int c2 = a;
        image[static_cast<std::size_t>(r * (r + 1) / 2 + c)] = r2 * (r2 + 1) / 2 + c2;
      }
    out.emplace_back(names[k], std::move(image));
  }
  return SymmetryGroup(std::move(out));
}

}  // namespace depthlab
