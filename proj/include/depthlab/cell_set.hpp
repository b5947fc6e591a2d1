#pragma once

#include <bit>
#include <cstdint>

namespace depthlab {

/// Set of board cells, one bit per cell index (up to 128 cells).
class CellSet {
 public:
  using Word = unsigned __int128;
  static constexpr int kCapacity = 128;

  constexpr CellSet() = default;
  explicit constexpr CellSet(Word bits) : bits_(bits) {}

  static constexpr CellSet single(int cell) { return CellSet(Word{1} << cell); }

  /// Cells [0, n).
  static constexpr CellSet first(int n) {
    return n >= kCapacity ? CellSet(~Word{0}) : CellSet((Word{1} << n) - 1);
  }

  constexpr Word raw() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool test(int cell) const { return (bits_ >> cell) & 1; }
  constexpr void set(int cell) { bits_ |= Word{1} << cell; }
  constexpr void reset(int cell) { bits_ &= ~(Word{1} << cell); }

  constexpr int count() const {
    return std::popcount(low()) + std::popcount(high());
  }

  /// Index of the lowest cell, or -1 when empty.
  constexpr int lowest() const {
    if (low() != 0) return std::countr_zero(low());
    if (high() != 0) return 64 + std::countr_zero(high());
    return -1;
  }

  /// Index of the k-th cell in ascending order (k < count()).
  constexpr int nth(int k) const {
    std::uint64_t word = low();
    int base = 0;
    const int low_count = std::popcount(word);
    if (k >= low_count) {
      k -= low_count;
      word = high();
      base = 64;
    }
    for (; k > 0; --k) word &= word - 1;
    return base + std::countr_zero(word);
  }

  template <class F>
  constexpr void for_each(F&& f) const {
    for (Word w = bits_; w != 0; w &= w - 1) {
      const auto lo = static_cast<std::uint64_t>(w);
      f(lo != 0 ? std::countr_zero(lo) : 64 + std::countr_zero(static_cast<std::uint64_t>(w >> 64)));
    }
  }

  friend constexpr CellSet operator|(CellSet a, CellSet b) { return CellSet(a.bits_ | b.bits_); }
  friend constexpr CellSet operator&(CellSet a, CellSet b) { return CellSet(a.bits_ & b.bits_); }
  friend constexpr CellSet operator^(CellSet a, CellSet b) { return CellSet(a.bits_ ^ b.bits_); }
  constexpr CellSet operator~() const { return CellSet(~bits_); }
  constexpr CellSet operator<<(int s) const { return CellSet(bits_ << s); }
  constexpr CellSet operator>>(int s) const { return CellSet(bits_ >> s); }
  constexpr CellSet& operator|=(CellSet o) { bits_ |= o.bits_; return *this; }
  constexpr CellSet& operator&=(CellSet o) { bits_ &= o.bits_; return *this; }
  friend constexpr bool operator==(CellSet, CellSet) = default;

 private:
  constexpr std::uint64_t low() const { return static_cast<std::uint64_t>(bits_); }
  constexpr std::uint64_t high() const { return static_cast<std::uint64_t>(bits_ >> 64); }

  Word bits_ = 0;
};

}  // namespace depthlab
