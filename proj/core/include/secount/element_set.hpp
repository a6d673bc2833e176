#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace secount {

inline constexpr int kMaxElements = 128;

/// Fixed-capacity bit set over poset element indices [0, kMaxElements).
class ElementSet {
 public:
  constexpr ElementSet() = default;

  static constexpr ElementSet first(int n) {
    ElementSet s;
    for (int w = 0; w < 2; ++w) {
      const int bits = n - 64 * w;
      if (bits >= 64) {
        s.words_[w] = ~std::uint64_t{0};
      } else if (bits > 0) {
        s.words_[w] = (std::uint64_t{1} << bits) - 1;
      }
    }
    return s;
  }

  constexpr bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  constexpr void set(int i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  constexpr void reset(int i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  constexpr int count() const { return std::popcount(words_[0]) + std::popcount(words_[1]); }
  constexpr bool empty() const { return (words_[0] | words_[1]) == 0; }
  constexpr bool intersects(const ElementSet& o) const {
    return ((words_[0] & o.words_[0]) | (words_[1] & o.words_[1])) != 0;
  }
  /// True if every element of this set is also in `o`.
  constexpr bool subset_of(const ElementSet& o) const {
    return ((words_[0] & ~o.words_[0]) | (words_[1] & ~o.words_[1])) == 0;
  }

  constexpr ElementSet& operator|=(const ElementSet& o) {
    words_[0] |= o.words_[0];
    words_[1] |= o.words_[1];
    return *this;
  }
  constexpr ElementSet& operator&=(const ElementSet& o) {
    words_[0] &= o.words_[0];
    words_[1] &= o.words_[1];
    return *this;
  }
  friend constexpr ElementSet operator|(ElementSet a, const ElementSet& b) { return a |= b; }
  friend constexpr ElementSet operator&(ElementSet a, const ElementSet& b) { return a &= b; }
  /// Set difference a \ b.
  friend constexpr ElementSet operator-(ElementSet a, const ElementSet& b) {
    a.words_[0] &= ~b.words_[0];
    a.words_[1] &= ~b.words_[1];
    return a;
  }

  /// Calls f(i) for each member in increasing order.
  template <class F>
  constexpr void for_each(F&& f) const {
    for (int w = 0; w < 2; ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        f(64 * w + std::countr_zero(bits));
        bits &= bits - 1;
      }
    }
  }

  constexpr std::uint64_t word(int w) const { return words_[w]; }

  friend constexpr bool operator==(const ElementSet&, const ElementSet&) = default;
  friend constexpr auto operator<=>(const ElementSet&, const ElementSet&) = default;

  std::size_t hash() const {
    std::uint64_t h = words_[0] * 0x9E3779B97F4A7C15ULL;
    h ^= (words_[1] + 0x632BE59BD9B4E019ULL) * 0xC2B2AE3D27D4EB4FULL;
    h ^= h >> 29;
    return static_cast<std::size_t>(h);
  }

 private:
  std::array<std::uint64_t, 2> words_{};
};

}  // namespace secount

template <>
struct std::hash<secount::ElementSet> {
  std::size_t operator()(const secount::ElementSet& s) const noexcept { return s.hash(); }
};
