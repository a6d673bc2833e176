#pragma once

// The decision tree whose leaves are the linear extensions of a poset: each
// branching removes one maximal element of what remains. Leaves cost 1, all
// other nodes 0, so the tree cost is the number of linear extensions.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "secount/element_set.hpp"
#include "secount/uint128.hpp"
#include "secount/poset.hpp"
#include "secount/tree.hpp"

namespace secount {

class LinearExtensionTree {
 public:
  /// Path identity is the mixed-radix rank of the child indices taken from
  /// the root: child = parent.rank + index * parent.radix, with radix
  /// multiplied by the sibling count. Exact while n <= kExactRankElements.
  struct Node {
    ElementSet deleted;
    uint128 rank = 0;
    uint128 radix = 1;
    std::uint8_t elem = kNoElement;  // element removed to reach this node
    std::uint8_t depth = 0;
    std::uint16_t sib = 1;           // maximal elements at the parent, this one included

    friend bool operator==(const Node&, const Node&) = default;
  };

  static constexpr std::uint8_t kNoElement = 0xFF;
  static constexpr int kExactRankElements = 34;

  explicit LinearExtensionTree(Poset p);

  std::vector<Node> roots() const { return {Node{}}; }
  void append_successors(const Node& v, std::vector<Node>& out) const;
  double cost(const Node& v) const { return v.depth == n_ ? 1.0 : 0.0; }
  /// Removed elements from the root, joined with '/'; "root" at the root.
  std::string label(const Node& v) const;
  ElementSet subtree_key(const Node& v) const { return v.deleted; }

  const Poset& poset() const { return *poset_; }
  int size() const { return n_; }

  /// Node reached by removing the named elements in order; throws
  /// std::invalid_argument if a name is unknown or not maximal at that point.
  Node follow(const std::vector<std::string_view>& names) const;

  /// Poset descendants of element e, counting e itself.
  int desc(int e) const { return desc_[e]; }

 private:
  std::shared_ptr<const Poset> poset_;
  int n_;
  std::vector<int> desc_;
};

/// Features the importance functions read. Root: sib 1, desc 1.
struct NodeFeatures {
  int sib = 1;
  int desc = 1;
  int height = 0;
};

NodeFeatures features(const LinearExtensionTree& t, const LinearExtensionTree::Node& v);

enum class ImportanceKind { uniform, f1, f2, f3, ideal };

std::string_view to_string(ImportanceKind k);
/// Accepts "uniform", "1"/"f1", "2"/"f2", "3"/"f3", "ideal".
std::optional<ImportanceKind> parse_importance(std::string_view s);

/// uniform: 1; f1: sib^3; f2: sib^3 desc; f3: sib^3 (height + desc) / max(height - desc, 1).
/// Not defined for `ideal`, which needs exact subtree costs.
double importance_value(ImportanceKind k, const NodeFeatures& f);

/// True when f3's denominator height - desc is below 1 and is replaced by 1.
inline bool f3_guard_hit(const NodeFeatures& f) { return f.height - f.desc < 1; }

/// Importance function on the decision tree. `ideal` uses exact subtree
/// costs from a table built at construction.
class LeImportance {
 public:
  LeImportance(const LinearExtensionTree& t, ImportanceKind kind);

  double operator()(const LinearExtensionTree::Node& v) const;
  ImportanceKind kind() const { return kind_; }

 private:
  const LinearExtensionTree* tree_;
  ImportanceKind kind_;
  std::shared_ptr<const SubtreeCostTable<LinearExtensionTree>> costs_;
};

}  // namespace secount

template <>
struct std::hash<secount::LinearExtensionTree::Node> {
  std::size_t operator()(const secount::LinearExtensionTree::Node& v) const noexcept {
    const auto lo = static_cast<std::uint64_t>(v.rank);
    const auto hi = static_cast<std::uint64_t>(v.rank >> 64);
    return v.deleted.hash() ^ (lo * 0x9E3779B97F4A7C15ULL) ^ (hi + v.depth);
  }
};
