#pragma once

// Knuth's single-path estimator and the two Stochastic Enumeration
// estimators: one for an arbitrary hypernode distribution, one driven by an
// importance function on nodes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "secount/choice.hpp"
#include "secount/distributions.hpp"
#include "secount/errors.hpp"
#include "secount/tree.hpp"

namespace secount {

/// Record of one run. Level k holds x_k; factors[k] and products[k] are D_k
/// and D_0...D_k for the step x_k -> x_{k+1}.
template <class Node>
struct Trajectory {
  std::vector<Hypernode<Node>> hypernodes;
  std::vector<double> level_costs;    // c(x_k) / |x_k|
  std::vector<double> factors;        // D_k
  std::vector<double> products;       // D after step k
  std::vector<double> probabilities;  // P(x_{k+1})
  double log_product = 0.0;           // ln of the final D
  std::size_t tau = 0;                // index of the terminal hypernode
  double estimate = 0.0;

  void clear() { *this = Trajectory{}; }
};

namespace detail {

// Shared level loop. `step(S, m, picked)` selects the next hypernode's
// positions in S (ascending) and returns its Draw.
template <TreeOracle T, class Step>
double run_levels(const T& t, std::span<const NodeOf<T>> root, std::size_t budget, Step&& step,
                  Trajectory<NodeOf<T>>* traj) {
  using Node = NodeOf<T>;
  if (root.empty()) throw std::invalid_argument("root hypernode must be nonempty");
  if (budget == 0) throw std::invalid_argument("budget must be at least 1");

  std::vector<Node> x(root.begin(), root.end());
  std::vector<Node> S, next;
  std::vector<std::size_t> picked;
  const double root_size = static_cast<double>(x.size());

  double D = 1.0;
  double log_d = 0.0;
  double C = hypernode_cost<T>(std::span<const Node>(x), t) / root_size;
  if (traj != nullptr) {
    traj->clear();
    traj->hypernodes.push_back({x, 0});
    traj->level_costs.push_back(C);
  }
  for (std::size_t k = 0;; ++k) {
    S.clear();
    for (const auto& v : x) t.append_successors(v, S);
    if (S.empty()) {
      const double estimate = root_size * C;
      if (traj != nullptr) {
        traj->tau = k;
        traj->estimate = estimate;
        traj->log_product = log_d;
      }
      return estimate;
    }
    const std::size_t m = std::min(budget, S.size());
    const Draw draw = step(std::span<const Node>(S), m, picked);
    if (!(draw.probability > 0.0) || !(draw.correction > 0.0) || !std::isfinite(draw.correction)) {
      throw EstimatorError("hypernode distribution returned an invalid probability at level " +
                           std::to_string(k + 1));
    }
    const double dk = (static_cast<double>(m) / static_cast<double>(x.size())) * draw.correction;
    D *= dk;
    log_d += std::log(dk);
    if (!std::isfinite(D)) {
      throw EstimatorError("level-size estimate overflowed at level " + std::to_string(k + 1) +
                           " (log10 D = " + std::to_string(log_d / std::log(10.0)) + ")");
    }
    next.clear();
    for (std::size_t i : picked) next.push_back(S[i]);
    const double level_cost = hypernode_cost<T>(std::span<const Node>(next), t) / static_cast<double>(m);
    C += level_cost * D;
    x.swap(next);
    if (traj != nullptr) {
      traj->hypernodes.push_back({x, k + 1});
      traj->level_costs.push_back(level_cost);
      traj->factors.push_back(dk);
      traj->products.push_back(D);
      traj->probabilities.push_back(draw.probability);
    }
  }
}

template <TreeOracle T>
auto successor_labels(const T& t, std::span<const NodeOf<T>> S) {
  return [&t, S](std::size_t i) { return t.label(S[i]); };
}

}  // namespace detail

/// Stochastic Enumeration with an arbitrary hypernode distribution. Returns
/// the estimate |x_0| C of the cost of the forest rooted at `root`.
template <TreeOracle T, class Dist>
double sep_estimate(const T& t, std::span<const NodeOf<T>> root, std::size_t budget, const Dist& dist,
                    ChoiceSource& c, Trajectory<NodeOf<T>>* traj = nullptr) {
  DrawScratch scratch;
  return detail::run_levels(
      t, root, budget,
      [&](std::span<const NodeOf<T>> S, std::size_t m, std::vector<std::size_t>& picked) {
        return dist.sample(S, m, c, detail::successor_labels(t, S), picked, scratch);
      },
      traj);
}

template <TreeOracle T, class Dist>
double sep_estimate(const T& t, std::size_t budget, const Dist& dist, ChoiceSource& c,
                    Trajectory<NodeOf<T>>* traj = nullptr) {
  const auto roots = t.roots();
  return sep_estimate(t, std::span<const NodeOf<T>>(roots), budget, dist, c, traj);
}

/// Stochastic Enumeration with importance sampling: one node of S drawn with
/// probability r(x)/r(S), the rest uniformly, and
/// D_k = (|x_{k+1}| / |x_k|) * r(S(x_k)) / r(x_{k+1}).
template <TreeOracle T, class Importance>
double sei_estimate(const T& t, std::span<const NodeOf<T>> root, std::size_t budget, const Importance& r,
                    ChoiceSource& c, Trajectory<NodeOf<T>>* traj = nullptr) {
  DrawScratch scratch;
  return detail::run_levels(
      t, root, budget,
      [&](std::span<const NodeOf<T>> S, std::size_t m, std::vector<std::size_t>& picked) {
        const auto labels = detail::successor_labels(t, S);
        evaluate_importance(r, S, labels, scratch.weights);
        const ImportanceDraw d = select_hypernode_by_importance(std::span<const double>(scratch.weights), m, c,
                                                                labels, picked, scratch.pool);
        return Draw{d.probability, d.weight_total / d.weight_selected};
      },
      traj);
}

template <TreeOracle T, class Importance>
double sei_estimate(const T& t, std::size_t budget, const Importance& r, ChoiceSource& c,
                    Trajectory<NodeOf<T>>* traj = nullptr) {
  const auto roots = t.roots();
  return sei_estimate(t, std::span<const NodeOf<T>>(roots), budget, r, c, traj);
}

/// Knuth's estimator: one root-to-leaf path, child drawn from `dist` with
/// budget 1, estimate c_0 + c_1 D_0 + ... + c_tau D_0...D_{tau-1} with
/// D_k = 1 / P(child).
template <TreeOracle T, class Dist>
double knuth_estimate(const T& t, const NodeOf<T>& root, const Dist& dist, ChoiceSource& c,
                      Trajectory<NodeOf<T>>* traj = nullptr) {
  using Node = NodeOf<T>;
  DrawScratch scratch;
  std::vector<Node> children;
  std::vector<std::size_t> picked;
  Node v = root;
  double D = 1.0;
  double estimate = t.cost(v);
  if (traj != nullptr) {
    traj->clear();
    traj->hypernodes.push_back({{v}, 0});
    traj->level_costs.push_back(estimate);
  }
  for (std::size_t k = 0;; ++k) {
    children.clear();
    t.append_successors(v, children);
    if (children.empty()) break;
    const std::span<const Node> S(children);
    const Draw draw = dist.sample(S, std::size_t{1}, c, detail::successor_labels(t, S), picked, scratch);
    if (!(draw.probability > 0.0)) throw EstimatorError("invalid child probability");
    D *= draw.correction;
    if (!std::isfinite(D)) throw EstimatorError("level-size estimate overflowed");
    v = children[picked.front()];
    const double cv = t.cost(v);
    estimate += cv * D;
    if (traj != nullptr) {
      traj->hypernodes.push_back({{v}, k + 1});
      traj->level_costs.push_back(cv);
      traj->factors.push_back(draw.correction);
      traj->products.push_back(D);
      traj->probabilities.push_back(draw.probability);
      traj->log_product += std::log(draw.correction);
    }
  }
  if (traj != nullptr) {
    traj->tau = traj->hypernodes.size() - 1;
    traj->estimate = estimate;
  }
  return estimate;
}

}  // namespace secount
