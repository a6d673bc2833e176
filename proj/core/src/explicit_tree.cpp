#include "secount/explicit_tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "secount/rng.hpp"

namespace secount {

ExplicitTree::ExplicitTree(std::vector<std::vector<std::uint32_t>> children, std::vector<double> costs,
                           std::vector<std::string> labels, std::vector<std::uint32_t> roots)
    : children_(std::move(children)),
      costs_(std::move(costs)),
      labels_(std::move(labels)),
      roots_(std::move(roots)) {
  const std::size_t n = children_.size();
  if (costs_.size() != n || labels_.size() != n) {
    throw std::invalid_argument("children, costs and labels must have equal length");
  }
  if (n > 0 && roots_.empty()) throw std::invalid_argument("non-empty forest needs at least one root");
  for (double c : costs_) {
    if (!std::isfinite(c) || c < 0.0) throw std::invalid_argument("node costs must be finite and >= 0");
  }
  std::vector<int> parents(n, 0);
  for (const auto& kids : children_) {
    for (std::uint32_t c : kids) {
      if (c >= n) throw std::invalid_argument("child index out of range");
      ++parents[c];
    }
  }
  for (std::uint32_t r : roots_) {
    if (r >= n) throw std::invalid_argument("root index out of range");
    if (parents[r] != 0) throw std::invalid_argument("root '" + labels_[r] + "' has a parent");
    ++parents[r];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (parents[i] != 1) {
      throw std::invalid_argument("node '" + labels_[i] + "' must have exactly one parent or be a root");
    }
  }
  // One parent each plus reachability from the roots rules out cycles.
  depth_.assign(n, 0);
  std::vector<char> seen(n, 0);
  std::vector<std::uint32_t> level(roots_.begin(), roots_.end());
  std::size_t reached = 0;
  for (std::size_t d = 0; !level.empty(); ++d) {
    std::vector<std::uint32_t> next;
    for (std::uint32_t v : level) {
      seen[v] = 1;
      depth_[v] = d;
      ++reached;
      for (std::uint32_t c : children_[v]) next.push_back(c);
    }
    level.swap(next);
  }
  if (reached != n) throw std::invalid_argument("forest contains nodes unreachable from the roots");
}

std::vector<ExplicitTree::Node> ExplicitTree::roots() const {
  std::vector<Node> out;
  out.reserve(roots_.size());
  for (std::uint32_t r : roots_) out.push_back(Node{r});
  return out;
}

std::size_t ExplicitTree::height() const {
  std::size_t h = 0;
  for (std::size_t d : depth_) h = std::max(h, d);
  return h;
}

ExplicitTree::Node ExplicitTree::find(std::string_view label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) return Node{static_cast<std::uint32_t>(i)};
  }
  throw std::out_of_range("no node labeled '" + std::string(label) + "'");
}

std::vector<ExplicitTree::Node> ExplicitTree::find_all(std::initializer_list<std::string_view> labels) const {
  std::vector<Node> out;
  for (auto l : labels) out.push_back(find(l));
  return out;
}

ExplicitTree ExplicitTree::with_costs(std::vector<double> costs) const {
  return ExplicitTree(children_, std::move(costs), labels_, roots_);
}

ExplicitTree example_tree() {
  // a  b  c  d  e  f  g  h  i  j  k   l   m   n
  // 0  1  2  3  4  5  6  7  8  9  10  11  12  13
  std::vector<std::vector<std::uint32_t>> children = {
      {1, 2}, {3}, {4, 5}, {6}, {7, 8}, {9}, {10, 11}, {}, {12}, {13}, {}, {}, {}, {}};
  std::vector<std::string> labels = {"a", "b", "c", "d", "e", "f", "g",
                                     "h", "i", "j", "k", "l", "m", "n"};
  return ExplicitTree(std::move(children), std::vector<double>(14, 1.0), std::move(labels), {0});
}

NodeWeights example_tree_importance() {
  //       a  b  c  d  e  f  g  h  i  j  k  l  m  n
  return {{5, 2, 3, 2, 2, 1, 2, 1, 1, 1, 1, 1, 1, 1}};
}

namespace {

// Post-order accumulation: children always have larger depth, so visiting
// nodes by decreasing depth is enough.
template <class Leaf, class Combine>
std::vector<double> accumulate_up(const ExplicitTree& t, Leaf leaf, Combine self) {
  const std::size_t n = t.size();
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return t.depth({a}) > t.depth({b});
  });
  std::vector<double> out(n, 0.0);
  for (std::uint32_t v : order) {
    const auto& kids = t.children({v});
    if (kids.empty()) {
      out[v] = leaf(v);
    } else {
      double s = self(v);
      for (std::uint32_t c : kids) s += out[c];
      out[v] = s;
    }
  }
  return out;
}

}  // namespace

NodeWeights leaf_count_weights(const ExplicitTree& t) {
  return {accumulate_up(t, [](std::uint32_t) { return 1.0; }, [](std::uint32_t) { return 0.0; })};
}

NodeWeights subtree_cost_weights(const ExplicitTree& t) {
  return {accumulate_up(
      t, [&](std::uint32_t v) { return t.cost({v}); }, [&](std::uint32_t v) { return t.cost({v}); })};
}

ExplicitTree random_tree(std::size_t nodes, std::size_t max_children, std::uint64_t seed, bool random_costs,
                         double root_probability) {
  if (nodes == 0) throw std::invalid_argument("random_tree needs at least one node");
  if (max_children == 0) throw std::invalid_argument("max_children must be positive");
  static constexpr double kCosts[] = {0.0, 0.5, 1.0, 2.0, 3.25};
  Rng rng(seed, {0x7472656565ULL});
  std::vector<std::vector<std::uint32_t>> children(nodes);
  std::vector<std::uint32_t> roots = {0};
  std::vector<std::uint32_t> open = {0};  // nodes that can still take a child
  for (std::uint32_t v = 1; v < nodes; ++v) {
    if (open.empty() || rng.uniform() < root_probability) {
      roots.push_back(v);
    } else {
      const std::size_t pick = rng.below(open.size());
      const std::uint32_t parent = open[pick];
      children[parent].push_back(v);
      if (children[parent].size() >= max_children) {
        open[pick] = open.back();
        open.pop_back();
      }
    }
    open.push_back(v);
  }
  std::vector<double> costs(nodes, 1.0);
  if (random_costs) {
    for (auto& c : costs) c = kCosts[rng.below(5)];
  }
  std::vector<std::string> labels(nodes);
  for (std::size_t i = 0; i < nodes; ++i) labels[i] = "v" + std::to_string(i);
  return ExplicitTree(std::move(children), std::move(costs), std::move(labels), std::move(roots));
}

}  // namespace secount
