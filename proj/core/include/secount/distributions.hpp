#pragma once

// Hypernode distributions for the arbitrary-probability estimator. Each one
// can draw a hyperchild and report the exact probability P(w) of any
// hyperchild, plus the correction 1/(C(|S|-1,|w|-1) P(w)) that enters D_k.

#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "secount/errors.hpp"
#include "secount/sampling.hpp"
#include "secount/tree.hpp"

namespace secount {

struct Draw {
  double probability = 0.0;
  double correction = 0.0;  // 1 / (C(|S|-1, |w|-1) * P(w))
};

/// Reusable buffers for a single estimator run.
struct DrawScratch {
  std::vector<double> weights;
  std::vector<std::size_t> pool;
};

/// r(x) = 1 for every node.
struct UnitImportance {
  template <class Node>
  double operator()(const Node&) const {
    return 1.0;
  }
};

/// Evaluates r on every node of S into `weights`, rejecting values that are
/// not positive and finite.
template <class Node, class Importance, class LabelOf>
void evaluate_importance(const Importance& r, std::span<const Node> S, const LabelOf& label_of,
                         std::vector<double>& weights) {
  weights.resize(S.size());
  for (std::size_t i = 0; i < S.size(); ++i) {
    const double w = static_cast<double>(r(S[i]));
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw EstimatorError("importance of node '" + std::string(label_of(i)) + "' is " + std::to_string(w) +
                           "; it must be positive and finite");
    }
    weights[i] = w;
  }
}

/// P(w) proportional to r(w) = sum of r over the members, drawn with the
/// two-phase procedure so only the weights of S are ever evaluated.
template <class Importance>
class ImportanceDistribution {
 public:
  explicit ImportanceDistribution(Importance r) : r_(std::move(r)) {}

  const Importance& importance() const { return r_; }

  template <class Node, class LabelOf>
  Draw sample(std::span<const Node> S, std::size_t m, ChoiceSource& c, const LabelOf& label_of,
              std::vector<std::size_t>& picked, DrawScratch& scratch) const {
    evaluate_importance(r_, S, label_of, scratch.weights);
    const auto d = select_hypernode_by_importance(std::span<const double>(scratch.weights), m, c, label_of,
                                                  picked, scratch.pool);
    return {d.probability, d.weight_total / d.weight_selected};
  }

  template <class Node>
  double probability(std::span<const Node> S, std::span<const std::size_t> picked) const {
    const auto [total, selected] = weights(S, picked);
    return (selected / total) / binomial(S.size() - 1, picked.size() - 1);
  }

  template <class Node>
  double correction(std::span<const Node> S, std::span<const std::size_t> picked) const {
    const auto [total, selected] = weights(S, picked);
    return total / selected;
  }

 private:
  template <class Node>
  std::pair<double, double> weights(std::span<const Node> S, std::span<const std::size_t> picked) const {
    double total = 0.0, selected = 0.0;
    for (const auto& v : S) total += static_cast<double>(r_(v));
    for (std::size_t i : picked) selected += static_cast<double>(r_(S[i]));
    return {total, selected};
  }

  Importance r_;
};

/// Every hyperchild equally likely: P(w) = 1 / C(|S|, m). Sampled with the
/// same two-phase procedure as unit importance, so trajectories match it
/// draw for draw.
class UniformDistribution {
 public:
  template <class Node, class LabelOf>
  Draw sample(std::span<const Node> S, std::size_t m, ChoiceSource& c, const LabelOf& label_of,
              std::vector<std::size_t>& picked, DrawScratch& scratch) const {
    scratch.weights.assign(S.size(), 1.0);
    const auto d = select_hypernode_by_importance(std::span<const double>(scratch.weights), m, c, label_of,
                                                  picked, scratch.pool);
    return {d.probability, static_cast<double>(S.size()) / static_cast<double>(m)};
  }

  template <class Node>
  double probability(std::span<const Node> S, std::span<const std::size_t> picked) const {
    return 1.0 / binomial(S.size(), picked.size());
  }

  template <class Node>
  double correction(std::span<const Node> S, std::span<const std::size_t> picked) const {
    return static_cast<double>(S.size()) / static_cast<double>(picked.size());
  }
};

/// Arbitrary distribution given by a positive weight on each hyperchild
/// (positions into S), normalized over H. Sampling and probability queries
/// enumerate H, so this is for small instances.
template <class Node>
class ExplicitDistribution {
 public:
  using WeightFn = std::function<double(std::span<const Node>, std::span<const std::size_t>)>;

  explicit ExplicitDistribution(WeightFn weight, std::size_t cap = kDefaultCombinationCap)
      : weight_(std::move(weight)), cap_(cap) {}

  template <class LabelOf>
  Draw sample(std::span<const Node> S, std::size_t m, ChoiceSource& c, const LabelOf& label_of,
              std::vector<std::size_t>& picked, DrawScratch& scratch) const {
    check_cap(S.size(), m);
    std::vector<std::vector<std::size_t>> subsets;
    scratch.weights.clear();
    for_each_combination(S.size(), m, [&](std::span<const std::size_t> idx) {
      subsets.emplace_back(idx.begin(), idx.end());
      scratch.weights.push_back(checked_weight(S, idx));
    });
    auto subset_label = [&](std::size_t k) {
      std::string s;
      for (std::size_t i : subsets[k]) {
        if (!s.empty()) s += ',';
        s += label_of(i);
      }
      return s;
    };
    const std::size_t k = weighted_pick(std::span<const double>(scratch.weights), c, subset_label);
    picked = subsets[k];
    double total = 0.0;
    for (double w : scratch.weights) total += w;
    const double p = scratch.weights[k] / total;
    return {p, 1.0 / (binomial(S.size() - 1, m - 1) * p)};
  }

  double probability(std::span<const Node> S, std::span<const std::size_t> picked) const {
    check_cap(S.size(), picked.size());
    double total = 0.0;
    for_each_combination(S.size(), picked.size(),
                         [&](std::span<const std::size_t> idx) { total += checked_weight(S, idx); });
    return checked_weight(S, picked) / total;
  }

  double correction(std::span<const Node> S, std::span<const std::size_t> picked) const {
    return 1.0 / (binomial(S.size() - 1, picked.size() - 1) * probability(S, picked));
  }

 private:
  double checked_weight(std::span<const Node> S, std::span<const std::size_t> idx) const {
    const double w = weight_(S, idx);
    if (!(w > 0.0) || !std::isfinite(w)) throw EstimatorError("hyperchild probability must be positive");
    return w;
  }
  void check_cap(std::size_t n, std::size_t m) const {
    if (binomial(n, m) > static_cast<double>(cap_)) {
      throw ResourceLimitError("explicit distribution over more than " + std::to_string(cap_) + " hyperchildren");
    }
  }

  WeightFn weight_;
  std::size_t cap_;
};

/// r(x) = Cost(T_x), the zero-variance importance function.
template <TreeOracle T>
class IdealImportance {
 public:
  IdealImportance(const T& tree, std::shared_ptr<const SubtreeCostTable<T>> costs)
      : tree_(&tree), costs_(std::move(costs)) {}
  explicit IdealImportance(const T& tree, std::size_t key_cap = kDefaultNodeCap)
      : IdealImportance(tree, std::make_shared<const SubtreeCostTable<T>>(tree, key_cap)) {}

  double operator()(const NodeOf<T>& v) const { return costs_->cost(*tree_, v); }
  const SubtreeCostTable<T>& table() const { return *costs_; }

 private:
  const T* tree_;
  std::shared_ptr<const SubtreeCostTable<T>> costs_;
};

/// P(w) = Cost(T_w) / sum over H of Cost(T_x), expressed directly on
/// hyperchildren rather than through node weights.
template <TreeOracle T>
ExplicitDistribution<NodeOf<T>> ideal_cost_distribution(const T& tree,
                                                        std::shared_ptr<const SubtreeCostTable<T>> costs) {
  return ExplicitDistribution<NodeOf<T>>(
      [&tree, costs](std::span<const NodeOf<T>> S, std::span<const std::size_t> idx) {
        double c = 0.0;
        for (std::size_t i : idx) c += costs->cost(tree, S[i]);
        return c;
      });
}

}  // namespace secount
