#pragma once

// Tree abstraction shared by every estimator: an implicit rooted forest given
// by a successor function and a nonnegative per-node cost.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "secount/errors.hpp"

namespace secount {

/// An implicit forest. Successor order must be deterministic, the forest must
/// have finite height, and cost() must be nonnegative. Implementations are
/// read-only after construction and safe to share between threads.
template <class T>
concept TreeOracle =
    std::equality_comparable<typename T::Node> &&
    requires(const T& t, const typename T::Node& v, std::vector<typename T::Node>& out) {
      { t.roots() } -> std::convertible_to<std::vector<typename T::Node>>;
      t.append_successors(v, out);
      { t.cost(v) } -> std::convertible_to<double>;
      { t.label(v) } -> std::convertible_to<std::string>;
    };

template <TreeOracle T>
using NodeOf = typename T::Node;

/// Oracles may declare a `subtree_key(node)` such that nodes with equal keys
/// root identical subtrees (costs, successor structure, and the features
/// importance functions read). Exact analysis memoizes on it. Without one,
/// the node itself is the key.
template <class T>
concept HasSubtreeKey = requires(const T& t, const typename T::Node& v) { t.subtree_key(v); };

template <TreeOracle T>
auto subtree_key(const T& t, const NodeOf<T>& v) {
  if constexpr (HasSubtreeKey<T>) {
    return t.subtree_key(v);
  } else {
    return v;
  }
}

template <TreeOracle T>
using SubtreeKeyOf = decltype(subtree_key(std::declval<const T&>(), std::declval<const NodeOf<T>&>()));

/// A set of distinct same-depth nodes. Nodes are kept in canonical
/// (left-to-right level) order, so set equality is structural equality.
template <class Node>
struct Hypernode {
  std::vector<Node> nodes;
  std::size_t depth = 0;

  std::size_t size() const { return nodes.size(); }
  bool operator==(const Hypernode&) const = default;
};

/// Binomial coefficient as a double; exact while the result is below 2^53.
inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return r;
}

/// Visits every k-subset of {0..n-1} in lexicographic order. The callback
/// receives the ascending index list and may return false to stop early.
template <class F>
void for_each_combination(std::size_t n, std::size_t k, F&& f) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if constexpr (std::is_same_v<std::invoke_result_t<F&, std::span<const std::size_t>>, bool>) {
      if (!f(std::span<const std::size_t>(idx))) return;
    } else {
      f(std::span<const std::size_t>(idx));
    }
    if (k == 0) return;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

template <TreeOracle T>
double hypernode_cost(std::span<const NodeOf<T>> h, const T& t) {
  double c = 0.0;
  for (const auto& v : h) c += t.cost(v);
  return c;
}

template <TreeOracle T>
double hypernode_cost(const Hypernode<NodeOf<T>>& h, const T& t) {
  return hypernode_cost<T>(std::span<const NodeOf<T>>(h.nodes), t);
}

/// S(h): member successors concatenated in member order, then oracle order.
/// In a tree distinct nodes have disjoint child sets, so no deduplication is
/// needed.
template <TreeOracle T>
std::vector<NodeOf<T>> hypernode_successors(std::span<const NodeOf<T>> h, const T& t) {
  std::vector<NodeOf<T>> out;
  for (const auto& v : h) t.append_successors(v, out);
  return out;
}

template <TreeOracle T>
std::vector<NodeOf<T>> hypernode_successors(const Hypernode<NodeOf<T>>& h, const T& t) {
  return hypernode_successors<T>(std::span<const NodeOf<T>>(h.nodes), t);
}

template <TreeOracle T>
Hypernode<NodeOf<T>> root_hypernode(const T& t) {
  return Hypernode<NodeOf<T>>{t.roots(), 0};
}

inline constexpr std::size_t kDefaultNodeCap = 10'000'000;
inline constexpr std::size_t kDefaultCombinationCap = 1'000'000;

/// Exact cost of the forest rooted at `root` by depth-first traversal with an
/// explicit stack.
template <TreeOracle T>
double exact_forest_cost(const T& t, std::span<const NodeOf<T>> root,
                         std::size_t node_cap = kDefaultNodeCap) {
  std::vector<NodeOf<T>> stack(root.begin(), root.end());
  std::size_t visited = 0;
  double total = 0.0;
  while (!stack.empty()) {
    NodeOf<T> v = std::move(stack.back());
    stack.pop_back();
    if (++visited > node_cap) {
      throw ResourceLimitError("exact traversal exceeded node cap of " + std::to_string(node_cap));
    }
    total += t.cost(v);
    t.append_successors(v, stack);
  }
  return total;
}

template <TreeOracle T>
double exact_forest_cost(const T& t, std::size_t node_cap = kDefaultNodeCap) {
  const auto roots = t.roots();
  return exact_forest_cost(t, std::span<const NodeOf<T>>(roots), node_cap);
}

/// Same total, accumulated level by level (breadth first).
template <TreeOracle T>
double exact_forest_cost_by_level(const T& t, std::span<const NodeOf<T>> root,
                                  std::size_t node_cap = kDefaultNodeCap) {
  std::vector<NodeOf<T>> level(root.begin(), root.end());
  std::vector<NodeOf<T>> next;
  std::size_t visited = 0;
  double total = 0.0;
  while (!level.empty()) {
    visited += level.size();
    if (visited > node_cap) {
      throw ResourceLimitError("exact traversal exceeded node cap of " + std::to_string(node_cap));
    }
    double level_cost = 0.0;
    next.clear();
    for (const auto& v : level) {
      level_cost += t.cost(v);
      t.append_successors(v, next);
    }
    total += level_cost;
    level.swap(next);
  }
  return total;
}

/// H(h): every min(B, |S(h)|)-subset of S(h), in lexicographic position order.
template <TreeOracle T>
std::vector<Hypernode<NodeOf<T>>> hyperchildren(const Hypernode<NodeOf<T>>& h, const T& t,
                                                std::size_t budget,
                                                std::size_t cap = kDefaultCombinationCap) {
  if (budget == 0) throw std::invalid_argument("budget must be at least 1");
  const auto succ = hypernode_successors(h, t);
  std::vector<Hypernode<NodeOf<T>>> out;
  if (succ.empty()) return out;
  const std::size_t m = std::min(budget, succ.size());
  if (binomial(succ.size(), m) > static_cast<double>(cap)) {
    throw ResourceLimitError("hyperchild count C(" + std::to_string(succ.size()) + "," +
                             std::to_string(m) + ") exceeds cap");
  }
  for_each_combination(succ.size(), m, [&](std::span<const std::size_t> idx) {
    Hypernode<NodeOf<T>> w;
    w.depth = h.depth + 1;
    w.nodes.reserve(m);
    for (std::size_t i : idx) w.nodes.push_back(succ[i]);
    out.push_back(std::move(w));
  });
  return out;
}

/// Exact Cost(T_v) for every node reachable from the roots, memoized on the
/// subtree key. Built eagerly so lookups are const and thread-safe.
template <TreeOracle T>
class SubtreeCostTable {
 public:
  using Node = NodeOf<T>;
  using Key = SubtreeKeyOf<T>;

  explicit SubtreeCostTable(const T& t, std::size_t key_cap = kDefaultNodeCap) {
    const auto roots = t.roots();
    build(t, roots, key_cap);
  }
  SubtreeCostTable(const T& t, std::span<const Node> roots, std::size_t key_cap = kDefaultNodeCap) {
    build(t, roots, key_cap);
  }

  double cost(const T& t, const Node& v) const {
    auto it = costs_.find(subtree_key(t, v));
    if (it == costs_.end()) throw std::out_of_range("node not reachable from the table's roots");
    return it->second;
  }

  double forest_cost(const T& t, std::span<const Node> h) const {
    double c = 0.0;
    for (const auto& v : h) c += cost(t, v);
    return c;
  }

  std::size_t size() const { return costs_.size(); }

 private:
  struct Frame {
    Node node;
    Key key;
    std::vector<Node> children;
    std::size_t next = 0;
    double acc = 0.0;
  };

  void build(const T& t, std::span<const Node> roots, std::size_t key_cap) {
    std::vector<Frame> stack;
    auto push = [&](const Node& v) {
      Frame f{v, subtree_key(t, v), {}, 0, t.cost(v)};
      t.append_successors(v, f.children);
      stack.push_back(std::move(f));
    };
    for (const auto& r : roots) {
      if (costs_.contains(subtree_key(t, r))) continue;
      push(r);
      while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.next < top.children.size()) {
          const Node& child = top.children[top.next];
          auto it = costs_.find(subtree_key(t, child));
          if (it != costs_.end()) {
            top.acc += it->second;
            ++top.next;
          } else {
            push(child);  // invalidates `top`
          }
          continue;
        }
        const double total = top.acc;
        costs_.emplace(top.key, total);
        if (costs_.size() > key_cap) {
          throw ResourceLimitError("subtree cost table exceeded cap of " + std::to_string(key_cap));
        }
        stack.pop_back();
        if (!stack.empty()) {
          stack.back().acc += total;
          ++stack.back().next;
        }
      }
    }
  }

  std::unordered_map<Key, double> costs_;
};

}  // namespace secount
