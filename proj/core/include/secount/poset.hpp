#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "secount/element_set.hpp"
#include "secount/uint128.hpp"

namespace secount {

/// Strict partial order on elements 0..n-1, stored transitively closed as
/// bit sets: below(i) = { j : v_i > v_j }, above(i) = { j : v_j > v_i }.
class Poset {
 public:
  /// Antichain on n elements, named "0", "1", ...
  explicit Poset(int n);

  /// Closes the relation {(i, j) : v_i > v_j}. Throws std::invalid_argument
  /// for out-of-range indices and Error when the relation has a cycle.
  static Poset from_relations(int n, const std::vector<std::pair<int, int>>& greater,
                              std::vector<std::string> names = {});

  int size() const { return n_; }
  bool greater(int i, int j) const { return below_[i].test(j); }
  const ElementSet& below(int i) const { return below_[i]; }
  const ElementSet& above(int i) const { return above_[i]; }
  const std::string& name(int i) const { return names_[i]; }

  /// Number of pairs (i, j) with v_i > v_j in the closed relation.
  std::size_t relation_count() const;

  /// Covering pairs (transitive reduction), sorted.
  std::vector<std::pair<int, int>> cover_relations() const;

  /// Members of `remaining` with nothing above them inside `remaining`.
  ElementSet maximal_in(const ElementSet& remaining) const;

  bool operator==(const Poset& o) const { return n_ == o.n_ && below_ == o.below_; }

 private:
  void close();

  int n_;
  std::vector<ElementSet> below_;
  std::vector<ElementSet> above_;
  std::vector<std::string> names_;
};

/// For each i < j independently, v_i > v_j with probability p; then the
/// transitive closure. Deterministic in (n, p, seed).
Poset random_poset(int n, double p, std::uint64_t seed);

Poset chain_poset(int n);
Poset antichain_poset(int n);

/// The five-element poset of the worked example: a > c, b > c, b > d, c > e.
Poset example_poset();

/// Text format: '#' comment lines, then n, then one "i j" line per relation
/// v_i > v_j. Reading closes the relation; writing emits the covering pairs.
Poset read_poset(std::istream& in);
Poset read_poset_file(const std::filesystem::path& path);
void write_poset(std::ostream& out, const Poset& p);
void write_poset_file(const std::filesystem::path& path, const Poset& p);

using LeCount = uint128;

inline constexpr int kMaxDpElements = 24;

/// Number of linear extensions by dynamic programming over the sets of
/// already-removed elements. n must not exceed kMaxDpElements.
LeCount count_linear_extensions(const Poset& p);

std::string to_string(LeCount x);
double to_double(LeCount x);

}  // namespace secount
