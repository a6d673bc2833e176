#pragma once

// Exact checks of the estimator theory on enumerable instances: the example
// tree and seeded random posets.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "secount/explicit_tree.hpp"
#include "secount/le_tree.hpp"
#include "secount/poset.hpp"

namespace secount {

inline constexpr double kMeanTolerance = 1e-9;       // exact mean vs exact cost, relative
inline constexpr double kVarianceTolerance = 1e-9;   // formula vs enumeration, relative to Cost^2
inline constexpr double kAlphaMeanTolerance = 1e-12; // |E[alpha] - 1|
inline constexpr double kIdentityTolerance = 1e-12;  // hyperchild cost identity, relative

/// Every number the checks compare for one (instance, budget, importance).
struct InstanceReport {
  std::string instance;
  std::size_t budget = 0;
  std::string importance;

  double exact_cost = 0.0;
  double mean = 0.0;              // exact expectation of the estimate
  double variance = 0.0;          // exact variance of the estimate
  double cv2 = 0.0;               // variance / cost^2
  double variance_formula = 0.0;  // recursive variance formula
  double cv2_formula = 0.0;       // recursive CV^2 formula
  double probability_mass_error = 0.0;

  bool alpha_defined = false;
  double alpha_mean = 0.0;
  double alpha_variance = 0.0;
  double alpha_max = 0.0;
  double level_max_product = 0.0;
  bool recursive_bound_holds = true;
  double cost_identity_worst = 0.0;
  std::size_t states = 0;

  bool unbiased() const;
  bool variance_matches() const;
  bool cv2_matches() const;
  bool alpha_mean_ok() const;
  bool alpha_variance_bound() const;  // CV^2 <= Var(alpha)
  bool alpha_max_bound() const;       // CV^2 <= max alpha - 1
  bool level_max_bound() const;       // CV^2 <= product of level maxima - 1
  bool cost_identity_ok() const;
  bool zero_variance() const;         // variance ~ 0 relative to cost^2
};

/// Analysis of the importance sampling estimator on the decision tree of
/// `p`. With `corrupt_correction`, the exact expectation is computed with
/// D_k using |S|/|w| in place of r(S)/r(w) (a deliberate bug).
InstanceReport analyze_poset_instance(const Poset& p, std::size_t budget, ImportanceKind kind,
                                      const std::string& name, bool corrupt_correction = false);

/// Same for an explicit tree with a per-node importance table.
InstanceReport analyze_tree_instance(const ExplicitTree& t, std::size_t budget, const NodeWeights& r,
                                     const std::string& name, const std::string& importance,
                                     bool corrupt_correction = false);

struct VerifyConfig {
  int max_n = 7;
  std::size_t max_budget = 3;
  std::size_t posets_per_size = 6;  // per (n, edge probability)
  std::vector<double> edge_probabilities{0.2, 0.5};
  std::uint64_t seed = 1;
  std::size_t zero_variance_runs = 200;
  bool corrupt_correction = false;
  unsigned threads = 1;
};

struct CheckResult {
  std::string name;
  bool passed = true;
  std::size_t instances = 0;
  std::string detail;          // worst discrepancy seen
  std::string counterexample;  // first failing instance, reproducible
};

std::vector<CheckResult> run_verification(const VerifyConfig& cfg);

/// Name, instance description, poset file text (when a poset), budget, importance.
std::string describe_instance(const InstanceReport& r, const Poset* p);

}  // namespace secount
