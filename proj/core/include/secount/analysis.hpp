#pragma once

// Exact (exponential) analysis of the estimators on small instances: literal
// enumeration of every hypernode sequence, memoized exact moments, the
// recursive variance and CV formulas, and the alpha statistics and bounds.
//
// The memoized routines identify a hypernode by its depth and the sorted
// subtree keys of its members. Distributions must therefore assign
// probabilities that depend only on the set of successors picked, not on
// their positions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "secount/distributions.hpp"
#include "secount/errors.hpp"
#include "secount/tree.hpp"

namespace secount {

inline constexpr std::size_t kDefaultSequenceCap = 1'000'000;
inline constexpr std::size_t kDefaultStateCap = 1'000'000;

/// |a - b| <= tol * max(|a|, |b|, scale).
inline bool close_relative(double a, double b, double tol, double scale = 0.0) {
  const double ref = std::max({std::fabs(a), std::fabs(b), std::fabs(scale)});
  return std::fabs(a - b) <= tol * ref;
}

/// Slack allowed when checking lhs <= rhs for quantities computed in floating
/// point: a few ulps of rounding, never a statistical margin.
inline double inequality_slack(double rhs) { return 1e-12 * std::max(1.0, std::fabs(rhs)); }
inline bool holds_le(double lhs, double rhs) { return lhs <= rhs + inequality_slack(rhs); }

template <class Node>
struct Outcome {
  std::vector<Hypernode<Node>> sequence;  // empty unless sequences were kept
  double probability = 0.0;
  double estimate = 0.0;
};

template <class Node>
struct OutcomeDistribution {
  std::vector<Outcome<Node>> outcomes;
  double total_probability = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double cv2 = 0.0;  // 0 when the mean is 0
};

namespace detail {

template <TreeOracle T>
using StateKey = std::pair<std::size_t, std::vector<SubtreeKeyOf<T>>>;

template <TreeOracle T>
StateKey<T> state_key(const T& t, std::span<const NodeOf<T>> h, std::size_t depth) {
  std::vector<SubtreeKeyOf<T>> keys;
  keys.reserve(h.size());
  for (const auto& v : h) keys.push_back(subtree_key(t, v));
  std::sort(keys.begin(), keys.end());
  return {depth, std::move(keys)};
}

inline void check_combinations(std::size_t n, std::size_t m, std::size_t cap) {
  if (binomial(n, m) > static_cast<double>(cap)) {
    throw ResourceLimitError("hyperchild count C(" + std::to_string(n) + "," + std::to_string(m) +
                             ") exceeds cap of " + std::to_string(cap));
  }
}

template <TreeOracle T, class Dist>
struct SequenceEnumerator {
  const T& t;
  std::size_t budget;
  const Dist& dist;
  std::size_t cap;
  bool keep;
  OutcomeDistribution<NodeOf<T>>& out;
  std::vector<Hypernode<NodeOf<T>>> path;

  // X(v) = c(v) + corr * X(w): `acc` is the estimate so far, `scale` the
  // product of corrections applied to the current level.
  void visit(std::vector<NodeOf<T>> h, std::size_t depth, double log_p, double acc, double scale) {
    using Node = NodeOf<T>;
    acc += scale * hypernode_cost<T>(std::span<const Node>(h), t);
    std::vector<Node> S;
    for (const auto& v : h) t.append_successors(v, S);
    if (keep) path.push_back({h, depth});
    if (S.empty()) {
      if (out.outcomes.size() >= cap) {
        throw ResourceLimitError("enumeration exceeded " + std::to_string(cap) + " hypernode sequences");
      }
      Outcome<Node> o;
      if (keep) o.sequence = path;
      o.probability = std::exp(log_p);
      o.estimate = acc;
      out.outcomes.push_back(std::move(o));
    } else {
      const std::size_t m = std::min(budget, S.size());
      check_combinations(S.size(), m, cap);
      const std::span<const Node> Sv(S);
      std::vector<std::vector<std::size_t>> subsets;
      for_each_combination(S.size(), m, [&](std::span<const std::size_t> idx) {
        subsets.emplace_back(idx.begin(), idx.end());
      });
      for (const auto& idx : subsets) {
        const double p = dist.probability(Sv, std::span<const std::size_t>(idx));
        if (!(p > 0.0)) throw EstimatorError("distribution assigns nonpositive probability to a hyperchild");
        const double corr = dist.correction(Sv, std::span<const std::size_t>(idx));
        std::vector<Node> w;
        w.reserve(m);
        for (std::size_t i : idx) w.push_back(S[i]);
        visit(std::move(w), depth + 1, log_p + std::log(p), acc, scale * corr);
      }
    }
    if (keep) path.pop_back();
  }
};

}  // namespace detail

/// Every hypernode sequence the estimator can produce from `root`, with its
/// exact probability and the estimate the algorithm returns on it.
template <TreeOracle T, class Dist>
OutcomeDistribution<NodeOf<T>> enumerate_distribution(const T& t, std::span<const NodeOf<T>> root,
                                                      std::size_t budget, const Dist& dist,
                                                      std::size_t cap = kDefaultSequenceCap,
                                                      bool keep_sequences = true) {
  if (budget == 0) throw std::invalid_argument("budget must be at least 1");
  if (root.empty()) throw std::invalid_argument("root hypernode must be nonempty");
  OutcomeDistribution<NodeOf<T>> out;
  detail::SequenceEnumerator<T, Dist> e{t, budget, dist, cap, keep_sequences, out, {}};
  e.visit(std::vector<NodeOf<T>>(root.begin(), root.end()), 0, 0.0, 0.0, 1.0);
  for (const auto& o : out.outcomes) {
    out.total_probability += o.probability;
    out.mean += o.probability * o.estimate;
  }
  for (const auto& o : out.outcomes) {
    const double d = o.estimate - out.mean;
    out.variance += o.probability * d * d;
  }
  if (out.mean != 0.0) out.cv2 = out.variance / (out.mean * out.mean);
  return out;
}

template <TreeOracle T, class Dist>
OutcomeDistribution<NodeOf<T>> enumerate_distribution(const T& t, std::size_t budget, const Dist& dist,
                                                      std::size_t cap = kDefaultSequenceCap,
                                                      bool keep_sequences = true) {
  const auto roots = t.roots();
  return enumerate_distribution(t, std::span<const NodeOf<T>>(roots), budget, dist, cap, keep_sequences);
}

struct ExactMoments {
  double mean = 0.0;
  double variance = 0.0;
  double cv2 = 0.0;                    // 0 when the mean is 0
  double probability_mass_error = 0.0; // max over hypernodes of |sum_w P(w) - 1|
  std::size_t states = 0;              // distinct hypernodes visited
};

namespace detail {

template <TreeOracle T, class Dist>
struct MomentSolver {
  using Node = NodeOf<T>;
  struct Entry {
    double mean, variance;
  };

  const T& t;
  std::size_t budget;
  const Dist& dist;
  std::size_t cap;
  std::map<StateKey<T>, Entry> memo;
  double mass_error = 0.0;

  Entry solve(const std::vector<Node>& h, std::size_t depth) {
    auto key = state_key<T>(t, std::span<const Node>(h), depth);
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    const double c = hypernode_cost<T>(std::span<const Node>(h), t);
    std::vector<Node> S;
    for (const auto& v : h) t.append_successors(v, S);
    Entry e{c, 0.0};
    if (!S.empty()) {
      const std::size_t m = std::min(budget, S.size());
      check_combinations(S.size(), m, cap);
      const std::span<const Node> Sv(S);
      struct Child {
        double p, corr;
        Entry sub;
      };
      std::vector<std::vector<std::size_t>> subsets;
      for_each_combination(S.size(), m, [&](std::span<const std::size_t> idx) {
        subsets.emplace_back(idx.begin(), idx.end());
      });
      std::vector<Child> kids;
      kids.reserve(subsets.size());
      double mass = 0.0;
      for (const auto& idx : subsets) {
        const std::span<const std::size_t> I(idx);
        Child k{dist.probability(Sv, I), dist.correction(Sv, I), {}};
        std::vector<Node> w;
        for (std::size_t i : idx) w.push_back(S[i]);
        k.sub = solve(w, depth + 1);
        mass += k.p;
        kids.push_back(k);
      }
      mass_error = std::max(mass_error, std::fabs(mass - 1.0));
      double mu = 0.0;
      for (const auto& k : kids) mu += k.p * k.corr * k.sub.mean;
      // law of total variance keeps every term nonnegative
      double var = 0.0;
      for (const auto& k : kids) {
        const double d = k.corr * k.sub.mean - mu;
        var += k.p * (k.corr * k.corr * k.sub.variance + d * d);
      }
      e = {c + mu, var};
    }
    if (memo.size() >= cap) throw ResourceLimitError("exact analysis exceeded " + std::to_string(cap) + " states");
    memo.emplace(std::move(key), e);
    return e;
  }
};

}  // namespace detail

/// Exact mean and variance of the estimate, by recursion over hypernodes:
/// X(v) = c(v) + corr(w) X(w), memoized on equivalent hypernodes.
template <TreeOracle T, class Dist>
ExactMoments exact_moments(const T& t, std::span<const NodeOf<T>> root, std::size_t budget, const Dist& dist,
                           std::size_t state_cap = kDefaultStateCap) {
  if (budget == 0) throw std::invalid_argument("budget must be at least 1");
  if (root.empty()) throw std::invalid_argument("root hypernode must be nonempty");
  detail::MomentSolver<T, Dist> s{t, budget, dist, state_cap, {}, 0.0};
  const auto e = s.solve(std::vector<NodeOf<T>>(root.begin(), root.end()), 0);
  ExactMoments m;
  m.mean = e.mean;
  m.variance = e.variance;
  if (e.mean != 0.0) m.cv2 = e.variance / (e.mean * e.mean);
  m.probability_mass_error = s.mass_error;
  m.states = s.memo.size();
  return m;
}

template <TreeOracle T, class Dist>
ExactMoments exact_moments(const T& t, std::size_t budget, const Dist& dist,
                           std::size_t state_cap = kDefaultStateCap) {
  const auto roots = t.roots();
  return exact_moments(t, std::span<const NodeOf<T>>(roots), budget, dist, state_cap);
}

/// Both sides of Cost(T_S(h)) = sum over w in H(h) of Cost(T_w) / C(|S|-1, |w|-1).
struct CostIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
};

template <TreeOracle T>
CostIdentity hyperchild_cost_identity(const T& t, std::span<const NodeOf<T>> h, std::size_t budget,
                                      const SubtreeCostTable<T>& costs,
                                      std::size_t cap = kDefaultCombinationCap) {
  using Node = NodeOf<T>;
  std::vector<Node> S;
  for (const auto& v : h) t.append_successors(v, S);
  CostIdentity id;
  if (S.empty()) return id;
  const std::size_t m = std::min(budget, S.size());
  detail::check_combinations(S.size(), m, cap);
  id.lhs = costs.forest_cost(t, std::span<const Node>(S));
  const double denom = binomial(S.size() - 1, m - 1);
  for_each_combination(S.size(), m, [&](std::span<const std::size_t> idx) {
    double c = 0.0;
    for (std::size_t i : idx) c += costs.cost(t, S[i]);
    id.rhs += c / denom;
  });
  return id;
}

/// Everything the importance-sampling analysis reports for one instance.
struct ImportanceAnalysis {
  double cost = 0.0;           // Cost(T_root)
  double variance = 0.0;       // recursive variance formula
  double cv2 = 0.0;            // recursive CV^2 formula
  bool cv2_defined = false;    // Cost(T_root) > 0

  bool alpha_defined = false;  // every visited S(x) has positive cost
  double alpha_mean = 0.0;
  double alpha_second_moment = 0.0;
  double alpha_variance = 0.0;
  double alpha_max = 0.0;
  std::vector<double> level_max;  // max over x_i at level i and w in H(x_i) of alpha(x_i, w)
  double level_max_product = 1.0;

  // Recursive CV bound checked at every visited hypernode: worst value of
  // (CV^2(v) + 1) - bound(v); <= 0 up to rounding when the bound holds.
  double recursive_bound_worst = -std::numeric_limits<double>::infinity();
  bool recursive_bound_holds = true;
  std::size_t recursive_bound_checks = 0;

  double cost_identity_worst = 0.0;  // max relative error of the hyperchild cost identity
  std::size_t cost_identity_checks = 0;

  std::size_t states = 0;
};

namespace detail {

template <TreeOracle T, class Importance>
struct ImportanceSolver {
  using Node = NodeOf<T>;
  struct Entry {
    double cost;      // Cost(T_v)
    double variance;  // recursive variance formula
    double cv2;       // recursive CV^2 formula (0 when Cost(T_v) = 0)
    double a1, a2, avar, amax;
  };

  const T& t;
  std::size_t budget;
  const Importance& r;
  const SubtreeCostTable<T>& costs;
  std::size_t cap;
  std::map<StateKey<T>, Entry> memo;
  ImportanceAnalysis& out;

  double weight(const Node& v) const {
    const double w = static_cast<double>(r(v));
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw EstimatorError("importance of node '" + std::string(t.label(v)) + "' is not positive and finite");
    }
    return w;
  }

  Entry solve(const std::vector<Node>& h, std::size_t depth) {
    auto key = state_key<T>(t, std::span<const Node>(h), depth);
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    const double cost_v = costs.forest_cost(t, std::span<const Node>(h));
    std::vector<Node> S;
    for (const auto& v : h) t.append_successors(v, S);
    Entry e{cost_v, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0};
    if (!S.empty()) {
      const std::size_t m = std::min(budget, S.size());
      check_combinations(S.size(), m, cap);
      std::vector<double> rs(S.size()), cs(S.size());
      double r_total = 0.0, cost_s = 0.0;
      for (std::size_t i = 0; i < S.size(); ++i) {
        rs[i] = weight(S[i]);
        cs[i] = costs.cost(t, S[i]);
        r_total += rs[i];
        cost_s += cs[i];
      }
      const double inv_binom = 1.0 / binomial(S.size() - 1, m - 1);

      struct Child {
        double ratio;   // r(S) / r(w)
        double cost_w;  // Cost(T_w)
        Entry sub;
      };
      std::vector<std::vector<std::size_t>> subsets;
      for_each_combination(S.size(), m, [&](std::span<const std::size_t> idx) {
        subsets.emplace_back(idx.begin(), idx.end());
      });
      std::vector<Child> kids;
      kids.reserve(subsets.size());
      for (const auto& idx : subsets) {
        double rw = 0.0, cw = 0.0;
        std::vector<Node> w;
        for (std::size_t i : idx) {
          rw += rs[i];
          cw += cs[i];
          w.push_back(S[i]);
        }
        kids.push_back({r_total / rw, cw, solve(w, depth + 1)});
      }

      // Recursive variance and CV^2 formulas.
      double var = 0.0, cv_sum = 0.0;
      for (const auto& k : kids) {
        var += inv_binom * k.ratio * (k.sub.variance + k.cost_w * k.cost_w);
        if (cost_v > 0.0) {
          const double q = k.cost_w / cost_v;
          cv_sum += inv_binom * k.ratio * q * q * (k.sub.cv2 + 1.0);
        }
      }
      e.variance = var - cost_s * cost_s;
      if (cost_v > 0.0) {
        const double q = cost_s / cost_v;
        e.cv2 = cv_sum - q * q;
      }

      // Hyperchild cost identity at this hypernode.
      double rhs = 0.0;
      for (const auto& k : kids) rhs += k.cost_w * inv_binom;
      const double ref = std::max({std::fabs(cost_s), std::fabs(rhs), 1e-300});
      out.cost_identity_worst = std::max(out.cost_identity_worst, std::fabs(cost_s - rhs) / ref);
      ++out.cost_identity_checks;

      if (cost_s > 0.0) {
        // alpha factor f(w) = r(S)/r(w) * Cost(T_w)/Cost(T_S); P(w) = inv_binom / ratio.
        double a1 = 0.0, a2 = 0.0, amax = 0.0, fmax = 0.0, bound = 0.0;
        for (const auto& k : kids) {
          const double p = inv_binom / k.ratio;
          const double f = k.ratio * k.cost_w / cost_s;
          a1 += p * f * k.sub.a1;
          a2 += p * f * f * k.sub.a2;
          amax = std::max(amax, f * k.sub.amax);
          fmax = std::max(fmax, f);
          const double q = k.cost_w / cost_s;
          bound += inv_binom * k.ratio * q * q * (k.sub.cv2 + 1.0);
        }
        double avar = 0.0;
        for (const auto& k : kids) {
          const double p = inv_binom / k.ratio;
          const double f = k.ratio * k.cost_w / cost_s;
          const double d = f * k.sub.a1 - a1;
          avar += p * (f * f * k.sub.avar + d * d);
        }
        e.a1 = a1;
        e.a2 = a2;
        e.avar = avar;
        e.amax = amax;
        if (out.level_max.size() <= depth) out.level_max.resize(depth + 1, 0.0);
        out.level_max[depth] = std::max(out.level_max[depth], fmax);

        if (cost_v > 0.0) {
          const double lhs = e.cv2 + 1.0;
          out.recursive_bound_worst = std::max(out.recursive_bound_worst, lhs - bound);
          if (!holds_le(lhs, bound)) out.recursive_bound_holds = false;
          ++out.recursive_bound_checks;
        }
      } else {
        out.alpha_defined = false;
      }
    }
    if (memo.size() >= cap) throw ResourceLimitError("exact analysis exceeded " + std::to_string(cap) + " states");
    memo.emplace(std::move(key), e);
    return e;
  }
};

}  // namespace detail

/// Runs the recursive variance and CV^2 formulas, the alpha statistics, the
/// recursive CV bound, and the hyperchild cost identity for the importance
/// sampling estimator with importance function r.
template <TreeOracle T, class Importance>
ImportanceAnalysis analyze_importance(const T& t, std::span<const NodeOf<T>> root, std::size_t budget,
                                      const Importance& r, const SubtreeCostTable<T>& costs,
                                      std::size_t state_cap = kDefaultStateCap) {
  if (budget == 0) throw std::invalid_argument("budget must be at least 1");
  if (root.empty()) throw std::invalid_argument("root hypernode must be nonempty");
  ImportanceAnalysis out;
  out.alpha_defined = true;
  detail::ImportanceSolver<T, Importance> s{t, budget, r, costs, state_cap, {}, out};
  const auto e = s.solve(std::vector<NodeOf<T>>(root.begin(), root.end()), 0);
  out.cost = e.cost;
  out.variance = e.variance;
  out.cv2_defined = e.cost > 0.0;
  out.cv2 = e.cv2;
  if (out.alpha_defined) {
    out.alpha_mean = e.a1;
    out.alpha_second_moment = e.a2;
    out.alpha_variance = e.avar;
    out.alpha_max = e.amax;
    out.level_max_product = 1.0;
    for (double f : out.level_max) out.level_max_product *= f;
  }
  out.states = s.memo.size();
  return out;
}

template <TreeOracle T, class Importance>
ImportanceAnalysis analyze_importance(const T& t, std::size_t budget, const Importance& r,
                                      std::size_t state_cap = kDefaultStateCap) {
  const auto roots = t.roots();
  const SubtreeCostTable<T> costs(t, std::span<const NodeOf<T>>(roots));
  return analyze_importance(t, std::span<const NodeOf<T>>(roots), budget, r, costs, state_cap);
}

/// Variance of the importance sampling estimate from the recursive formula.
template <TreeOracle T, class Importance>
double recursive_variance(const T& t, std::span<const NodeOf<T>> root, std::size_t budget, const Importance& r,
                         std::size_t state_cap = kDefaultStateCap) {
  const SubtreeCostTable<T> costs(t, root);
  return analyze_importance(t, root, budget, r, costs, state_cap).variance;
}

/// CV^2 of the importance sampling estimate from its own recursion. Throws
/// EstimatorError when the forest has zero cost.
template <TreeOracle T, class Importance>
double recursive_cv2(const T& t, std::span<const NodeOf<T>> root, std::size_t budget, const Importance& r,
                     std::size_t state_cap = kDefaultStateCap) {
  const SubtreeCostTable<T> costs(t, root);
  const auto a = analyze_importance(t, root, budget, r, costs, state_cap);
  if (!a.cv2_defined) throw EstimatorError("coefficient of variation undefined: forest cost is zero");
  return a.cv2;
}

struct AlphaStats {
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
  double max = 0.0;
  std::vector<double> level_max;
  double level_max_product = 1.0;
};

template <TreeOracle T, class Importance>
AlphaStats alpha_stats(const T& t, std::span<const NodeOf<T>> root, std::size_t budget, const Importance& r,
                       std::size_t state_cap = kDefaultStateCap) {
  const SubtreeCostTable<T> costs(t, root);
  const auto a = analyze_importance(t, root, budget, r, costs, state_cap);
  if (!a.alpha_defined) throw EstimatorError("alpha undefined: a successor forest has zero cost");
  return {a.alpha_mean, a.alpha_second_moment, a.alpha_variance, a.alpha_max, a.level_max, a.level_max_product};
}

/// alpha(x_0, ..., x_n) = prod over i of r(S(x_{i-1}))/r(x_i) * Cost(T_{x_i})/Cost(T_{S(x_{i-1})}).
template <TreeOracle T, class Importance>
double alpha(std::span<const Hypernode<NodeOf<T>>> sequence, const T& t, const Importance& r,
             const SubtreeCostTable<T>& costs) {
  using Node = NodeOf<T>;
  double a = 1.0;
  for (std::size_t i = 1; i < sequence.size(); ++i) {
    const auto S = hypernode_successors(sequence[i - 1], t);
    double rs = 0.0, rw = 0.0;
    for (const auto& v : S) rs += static_cast<double>(r(v));
    for (const auto& v : sequence[i].nodes) rw += static_cast<double>(r(v));
    if (!(rs > 0.0) || !(rw > 0.0)) throw EstimatorError("alpha: importance must be positive");
    const double cost_s = costs.forest_cost(t, std::span<const Node>(S));
    if (!(cost_s > 0.0)) throw EstimatorError("alpha: successor forest at level " + std::to_string(i) + " has zero cost");
    a *= (rs / rw) * (costs.forest_cost(t, std::span<const Node>(sequence[i].nodes)) / cost_s);
  }
  return a;
}

/// One exportable line of analysis results.
struct AnalysisRow {
  std::string instance;
  std::size_t budget = 0;
  std::string importance;
  double variance = 0.0;
  double cv2 = 0.0;
  double alpha_variance = 0.0;
  double alpha_max = 0.0;
  double level_max_product = 0.0;
};

void write_analysis_csv(std::ostream& os, std::span<const AnalysisRow> rows);

}  // namespace secount
