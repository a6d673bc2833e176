#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "secount/tree.hpp"

namespace secount {

/// A forest stored as child lists, with per-node costs and labels.
class ExplicitTree {
 public:
  struct Node {
    std::uint32_t index = 0;
    friend auto operator<=>(const Node&, const Node&) = default;
  };

  /// Validates that `children` describes a forest whose roots are exactly
  /// `roots`, that every node is reachable, and that costs are finite and >= 0.
  ExplicitTree(std::vector<std::vector<std::uint32_t>> children, std::vector<double> costs,
               std::vector<std::string> labels, std::vector<std::uint32_t> roots);

  std::vector<Node> roots() const;
  void append_successors(const Node& v, std::vector<Node>& out) const {
    for (std::uint32_t c : children_[v.index]) out.push_back(Node{c});
  }
  double cost(const Node& v) const { return costs_[v.index]; }
  std::string label(const Node& v) const { return labels_[v.index]; }

  std::size_t size() const { return children_.size(); }
  std::size_t depth(const Node& v) const { return depth_[v.index]; }
  std::size_t height() const;
  const std::vector<std::uint32_t>& children(const Node& v) const { return children_[v.index]; }

  /// Node with the given label; throws std::out_of_range if absent.
  Node find(std::string_view label) const;
  std::vector<Node> find_all(std::initializer_list<std::string_view> labels) const;

  /// Copy of this tree with different node costs.
  ExplicitTree with_costs(std::vector<double> costs) const;

 private:
  std::vector<std::vector<std::uint32_t>> children_;
  std::vector<double> costs_;
  std::vector<std::string> labels_;
  std::vector<std::uint32_t> roots_;
  std::vector<std::size_t> depth_;
};

/// Per-node weight table, usable as an importance function.
struct NodeWeights {
  std::vector<double> weights;
  double operator()(const ExplicitTree::Node& v) const { return weights[v.index]; }
};

/// The 14-node tree a..n used by the worked examples, unit costs.
ExplicitTree example_tree();

/// Leaves-under-node counts for the example tree, hard-coded.
NodeWeights example_tree_importance();

/// Number of leaves in each node's subtree (a leaf counts itself).
NodeWeights leaf_count_weights(const ExplicitTree& t);

/// Exact subtree cost of every node, usable as the ideal importance function.
NodeWeights subtree_cost_weights(const ExplicitTree& t);

/// Random forest with `nodes` nodes: each new node attaches to a uniformly
/// chosen earlier node with fewer than `max_children` children, or becomes a
/// new root with probability `root_probability`. Costs are drawn from
/// {0, 0.5, 1, 2, 3.25} when `random_costs`, else all 1.
ExplicitTree random_tree(std::size_t nodes, std::size_t max_children, std::uint64_t seed,
                         bool random_costs = false, double root_probability = 0.0);

}  // namespace secount

template <>
struct std::hash<secount::ExplicitTree::Node> {
  std::size_t operator()(const secount::ExplicitTree::Node& v) const noexcept {
    return std::hash<std::uint32_t>{}(v.index);
  }
};
