#pragma once

// Selection primitives: weighted pick, uniform subset by partial
// Fisher-Yates, and the two-phase importance-weighted hypernode draw.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "secount/choice.hpp"
#include "secount/errors.hpp"
#include "secount/tree.hpp"

namespace secount {

inline std::string index_label(std::size_t i) { return std::to_string(i); }

struct IndexLabel {
  std::string operator()(std::size_t i) const { return index_label(i); }
};

/// Returns i with probability weights[i] / sum(weights). Scripted sources
/// select the candidate whose label_of(i) matches the next weighted entry.
/// A linear cumulative scan; candidate lists are short.
template <class LabelOf>
std::size_t weighted_pick(std::span<const double> weights, ChoiceSource& c, const LabelOf& label_of) {
  if (weights.empty()) throw std::invalid_argument("weighted_pick: empty candidate list");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw std::invalid_argument("weighted_pick: weight " + std::to_string(i) + " is not positive and finite");
    }
    total += weights[i];
  }
  if (c.is_scripted()) {
    const ScriptedChoice& entry = c.next_scripted(Phase::weighted);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (label_of(i) == entry.label) return i;
    }
    throw ScriptError("scripted weighted choice '" + entry.label + "' is not a candidate");
  }
  if (weights.size() == 1) return 0;
  const double target = c.rng().uniform() * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cum += weights[i];
    if (target < cum) return i;
  }
  return weights.size() - 1;
}

inline std::size_t weighted_pick(std::span<const double> weights, ChoiceSource& c) {
  return weighted_pick(weights, c, IndexLabel{});
}

/// Partial Fisher-Yates: afterwards pool[0..k) is a uniformly random k-subset
/// of the original pool (in draw order). label_of maps a pool item to the
/// label scripted sources match against.
template <class T, class LabelOf>
void uniform_subset_in_place(std::vector<T>& pool, std::size_t k, ChoiceSource& c, const LabelOf& label_of) {
  if (k > pool.size()) throw std::invalid_argument("uniform_subset: k exceeds pool size");
  if (c.is_scripted()) {
    for (std::size_t t = 0; t < k; ++t) {
      const ScriptedChoice& entry = c.next_scripted(Phase::uniform);
      std::size_t j = t;
      while (j < pool.size() && label_of(pool[j]) != entry.label) ++j;
      if (j == pool.size()) {
        throw ScriptError("scripted uniform choice '" + entry.label + "' is not among the remaining candidates");
      }
      std::swap(pool[t], pool[j]);
    }
    return;
  }
  if (k == pool.size()) return;  // the subset is forced
  for (std::size_t t = 0; t < k; ++t) {
    const std::size_t j = t + static_cast<std::size_t>(c.rng().below(pool.size() - t));
    std::swap(pool[t], pool[j]);
  }
}

/// Uniformly random k-subset of `pool`, in draw order.
template <class T>
std::vector<T> uniform_subset(std::vector<T> pool, std::size_t k, ChoiceSource& c) {
  uniform_subset_in_place(pool, k, c, [](const T& x) {
    if constexpr (std::is_convertible_v<T, std::string>) {
      return std::string(x);
    } else {
      return index_label(static_cast<std::size_t>(x));
    }
  });
  pool.resize(k);
  return pool;
}

struct ImportanceDraw {
  double probability = 0.0;      // P(w) = r(w)/r(S) / C(|S|-1, |w|-1)
  double weight_total = 0.0;     // r(S)
  double weight_selected = 0.0;  // r(w)
};

/// Two-phase draw of an m-subset of S: one position with probability
/// weights[i]/sum(weights), then m-1 more uniformly from the rest. `picked`
/// receives the chosen positions in ascending order. `pool` is scratch space.
template <class LabelOf>
ImportanceDraw select_hypernode_by_importance(std::span<const double> weights, std::size_t m, ChoiceSource& c,
                                              const LabelOf& label_of, std::vector<std::size_t>& picked,
                                              std::vector<std::size_t>& pool) {
  const std::size_t n = weights.size();
  if (m == 0 || m > n) throw std::invalid_argument("hypernode size must be in [1, |S|]");
  const std::size_t first = weighted_pick(weights, c, label_of);
  pool.clear();
  for (std::size_t i = 0; i < n; ++i) {
    if (i != first) pool.push_back(i);
  }
  uniform_subset_in_place(pool, m - 1, c, label_of);
  picked.clear();
  picked.push_back(first);
  picked.insert(picked.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m - 1));
  std::sort(picked.begin(), picked.end());

  ImportanceDraw d;
  for (double w : weights) d.weight_total += w;
  for (std::size_t i : picked) d.weight_selected += weights[i];
  d.probability = (d.weight_selected / d.weight_total) / binomial(n - 1, m - 1);
  return d;
}

template <class Node>
struct SelectedHypernode {
  std::vector<Node> nodes;
  double probability = 0.0;
};

/// Node-level form: evaluates r on S, draws min(budget, |S|) nodes, and
/// returns them in S order with their exact selection probability.
template <class Node, class Importance, class LabelOf = IndexLabel>
SelectedHypernode<Node> select_hypernode_by_importance(std::span<const Node> successors, std::size_t budget,
                                                       const Importance& r, ChoiceSource& c,
                                                       const LabelOf& label_of = {}) {
  if (successors.empty()) throw std::invalid_argument("cannot select from an empty successor set");
  if (budget == 0) throw std::invalid_argument("budget must be at least 1");
  std::vector<double> weights;
  weights.reserve(successors.size());
  for (const auto& v : successors) weights.push_back(static_cast<double>(r(v)));
  std::vector<std::size_t> picked, pool;
  const auto d = select_hypernode_by_importance(std::span<const double>(weights),
                                                std::min(budget, successors.size()), c, label_of, picked, pool);
  SelectedHypernode<Node> out;
  out.probability = d.probability;
  for (std::size_t i : picked) out.nodes.push_back(successors[i]);
  return out;
}

}  // namespace secount
