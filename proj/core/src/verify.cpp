#include "secount/verify.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include "secount/analysis.hpp"
#include "secount/csv.hpp"
#include "secount/distributions.hpp"
#include "secount/estimators.hpp"
#include "secount/experiments.hpp"
#include "secount/parallel.hpp"
#include "secount/rng.hpp"

namespace secount {

namespace {

// Importance-induced probabilities with a wrong level factor: |S|/|w|
// instead of r(S)/r(w). Exists only so the suite can show it catches it.
template <class Importance>
class CorruptedDistribution {
 public:
  explicit CorruptedDistribution(Importance r) : inner_(std::move(r)) {}

  template <class Node>
  double probability(std::span<const Node> S, std::span<const std::size_t> picked) const {
    return inner_.probability(S, picked);
  }
  template <class Node>
  double correction(std::span<const Node> S, std::span<const std::size_t> picked) const {
    return static_cast<double>(S.size()) / static_cast<double>(picked.size());
  }

 private:
  ImportanceDistribution<Importance> inner_;
};

template <TreeOracle T, class Importance>
InstanceReport analyze(const T& t, std::size_t budget, const Importance& r, double exact, std::string name,
                       std::string importance, bool corrupt) {
  InstanceReport rep;
  rep.instance = std::move(name);
  rep.budget = budget;
  rep.importance = std::move(importance);
  rep.exact_cost = exact;

  const auto roots = t.roots();
  const std::span<const NodeOf<T>> root(roots);
  const ExactMoments m = corrupt ? exact_moments(t, root, budget, CorruptedDistribution<Importance>(r))
                                 : exact_moments(t, root, budget, ImportanceDistribution<Importance>(r));
  rep.mean = m.mean;
  rep.variance = m.variance;
  rep.cv2 = exact != 0.0 ? m.variance / (exact * exact) : 0.0;
  rep.probability_mass_error = m.probability_mass_error;

  const SubtreeCostTable<T> costs(t, root);
  const ImportanceAnalysis a = analyze_importance(t, root, budget, r, costs);
  rep.variance_formula = a.variance;
  rep.cv2_formula = a.cv2;
  rep.alpha_defined = a.alpha_defined;
  rep.alpha_mean = a.alpha_mean;
  rep.alpha_variance = a.alpha_variance;
  rep.alpha_max = a.alpha_max;
  rep.level_max_product = a.level_max_product;
  rep.recursive_bound_holds = a.recursive_bound_holds;
  rep.cost_identity_worst = a.cost_identity_worst;
  rep.states = std::max(m.states, a.states);
  return rep;
}

struct Instance {
  std::string name;
  std::optional<Poset> poset;
  int tree_importance = 0;  // example tree: 0 unit, 1 leaf count, 2 ideal
  std::size_t budget = 1;
  ImportanceKind kind = ImportanceKind::uniform;
};

std::string tree_importance_name(int k) {
  static const char* names[] = {"uniform", "leaf-count", "ideal"};
  return names[k];
}

InstanceReport run_instance(const Instance& in, bool corrupt) {
  if (in.poset) return analyze_poset_instance(*in.poset, in.budget, in.kind, in.name, corrupt);
  const ExplicitTree t = example_tree();
  NodeWeights w;
  switch (in.tree_importance) {
    case 0: w.weights.assign(t.size(), 1.0); break;
    case 1: w = example_tree_importance(); break;
    default: w = subtree_cost_weights(t); break;
  }
  return analyze_tree_instance(t, in.budget, w, in.name, tree_importance_name(in.tree_importance), corrupt);
}

bool is_ideal(const Instance& in) {
  return in.poset ? in.kind == ImportanceKind::ideal : in.tree_importance == 2;
}

// Every estimate of `runs` seeded runs with ideal importance equals the exact cost.
bool zero_variance_runs(const Instance& in, std::size_t runs, std::uint64_t seed, double& worst) {
  auto check = [&](const auto& t, const auto& r, double exact) {
    const auto roots = t.roots();
    bool ok = true;
    for (std::size_t i = 0; i < runs; ++i) {
      ChoiceSource c = ChoiceSource::random(Rng(seed, {0x7a65726f, in.budget, i}));
      const double e = sei_estimate(t, std::span<const NodeOf<std::decay_t<decltype(t)>>>(roots), in.budget, r, c);
      worst = std::max(worst, std::fabs(e - exact) / exact);
      if (!close_relative(e, exact, kMeanTolerance)) ok = false;
    }
    return ok;
  };
  if (in.poset) {
    const LinearExtensionTree t(*in.poset);
    return check(t, LeImportance(t, ImportanceKind::ideal), to_double(count_linear_extensions(*in.poset)));
  }
  const ExplicitTree t = example_tree();
  return check(t, subtree_cost_weights(t), exact_forest_cost(t));
}

// Literal enumeration of every sequence agrees with the memoized moments.
bool literal_enumeration_agrees(const Instance& in, const InstanceReport& rep, std::string& detail) {
  auto run = [&](const auto& t, const auto& r) {
    const auto d = enumerate_distribution(t, in.budget, ImportanceDistribution<std::decay_t<decltype(r)>>(r),
                                          kDefaultSequenceCap, false);
    const bool ok = close_relative(d.mean, rep.mean, kMeanTolerance) &&
                    close_relative(d.variance, rep.variance, kVarianceTolerance, rep.exact_cost * rep.exact_cost) &&
                    std::fabs(d.total_probability - 1.0) <= 1e-12;
    if (!ok) {
      detail = "enumerated mean " + format_double(d.mean) + " variance " + format_double(d.variance) +
               " over " + std::to_string(d.outcomes.size()) + " sequences";
    }
    return ok;
  };
  if (in.poset) {
    const LinearExtensionTree t(*in.poset);
    return run(t, LeImportance(t, in.kind));
  }
  const ExplicitTree t = example_tree();
  NodeWeights w;
  switch (in.tree_importance) {
    case 0: w.weights.assign(t.size(), 1.0); break;
    case 1: w = example_tree_importance(); break;
    default: w = subtree_cost_weights(t); break;
  }
  return run(t, w);
}

}  // namespace

bool InstanceReport::unbiased() const { return close_relative(mean, exact_cost, kMeanTolerance); }
bool InstanceReport::variance_matches() const {
  return close_relative(variance_formula, variance, kVarianceTolerance, exact_cost * exact_cost);
}
bool InstanceReport::cv2_matches() const { return close_relative(cv2_formula, cv2, kVarianceTolerance, 1.0); }
bool InstanceReport::alpha_mean_ok() const {
  return alpha_defined && std::fabs(alpha_mean - 1.0) <= kAlphaMeanTolerance;
}
bool InstanceReport::alpha_variance_bound() const { return alpha_defined && holds_le(cv2, alpha_variance); }
bool InstanceReport::alpha_max_bound() const { return alpha_defined && holds_le(cv2, alpha_max - 1.0); }
bool InstanceReport::level_max_bound() const { return alpha_defined && holds_le(cv2, level_max_product - 1.0); }
bool InstanceReport::cost_identity_ok() const { return cost_identity_worst <= kIdentityTolerance; }
bool InstanceReport::zero_variance() const { return variance <= kVarianceTolerance * exact_cost * exact_cost; }

InstanceReport analyze_poset_instance(const Poset& p, std::size_t budget, ImportanceKind kind,
                                      const std::string& name, bool corrupt_correction) {
  const LinearExtensionTree t(p);
  const double exact = p.size() <= kMaxDpElements ? to_double(count_linear_extensions(p)) : exact_forest_cost(t);
  return analyze(t, budget, LeImportance(t, kind), exact, name, std::string(to_string(kind)), corrupt_correction);
}

InstanceReport analyze_tree_instance(const ExplicitTree& t, std::size_t budget, const NodeWeights& r,
                                     const std::string& name, const std::string& importance,
                                     bool corrupt_correction) {
  return analyze(t, budget, r, exact_forest_cost(t), name, importance, corrupt_correction);
}

std::string describe_instance(const InstanceReport& r, const Poset* p) {
  std::ostringstream os;
  os << "instance " << r.instance << ", B=" << r.budget << ", importance " << r.importance << ", exact cost "
     << format_double(r.exact_cost) << ", exact mean " << format_double(r.mean);
  if (p != nullptr) {
    os << "\n";
    write_poset(os, *p);
  }
  return os.str();
}

std::vector<CheckResult> run_verification(const VerifyConfig& cfg) {
  if (cfg.max_budget < 1) throw std::invalid_argument("max budget must be at least 1");
  std::vector<Instance> instances;
  for (std::size_t b = 1; b <= cfg.max_budget; ++b) {
    for (int k = 0; k < 3; ++k) instances.push_back({"example-tree", std::nullopt, k, b, ImportanceKind::uniform});
  }
  const ImportanceKind kinds[] = {ImportanceKind::uniform, ImportanceKind::f1, ImportanceKind::f2, ImportanceKind::f3,
                                  ImportanceKind::ideal};
  std::vector<std::pair<std::string, Poset>> posets;
  if (cfg.max_n >= 5) posets.emplace_back("example-poset", example_poset());
  for (int n = 1; n <= cfg.max_n; ++n) {
    for (std::size_t pi = 0; pi < cfg.edge_probabilities.size(); ++pi) {
      const double p = cfg.edge_probabilities[pi];
      for (std::size_t k = 0; k < cfg.posets_per_size; ++k) {
        const std::uint64_t s = Rng(cfg.seed, {0x766572, static_cast<std::uint64_t>(n), pi, k}).next_u64();
        posets.emplace_back("random(n=" + std::to_string(n) + ",p=" + format_double(p) + ",seed=" +
                                std::to_string(s) + ")",
                            random_poset(n, p, s));
      }
    }
  }
  for (const auto& [name, p] : posets) {
    for (std::size_t b = 1; b <= cfg.max_budget; ++b) {
      for (ImportanceKind kind : kinds) instances.push_back({name, p, 0, b, kind});
    }
  }

  struct Outcome {
    InstanceReport rep;
    bool zero_runs_ok = true;
    double zero_runs_worst = 0.0;
    bool literal_checked = false;
    bool literal_ok = true;
    std::string literal_detail;
    std::string error;
  };
  std::vector<Outcome> results(instances.size());
  parallel_for(instances.size(), cfg.threads, [&](std::size_t i) {
    const Instance& in = instances[i];
    Outcome& o = results[i];
    try {
      o.rep = run_instance(in, cfg.corrupt_correction);
      if (is_ideal(in)) o.zero_runs_ok = zero_variance_runs(in, cfg.zero_variance_runs, cfg.seed, o.zero_runs_worst);
      if (!in.poset || in.poset->size() <= 4) {
        o.literal_checked = true;
        o.literal_ok = literal_enumeration_agrees(in, o.rep, o.literal_detail);
      }
    } catch (const std::exception& e) {
      o.error = e.what();
    }
  });

  struct Check {
    std::string name;
    std::function<bool(const Instance&, const Outcome&)> applies;
    std::function<bool(const Outcome&)> pass;
    std::function<double(const Outcome&)> discrepancy;
  };
  auto all = [](const Instance&, const Outcome&) { return true; };
  auto rel = [](double a, double b, double scale) {
    return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), scale, 1e-300});
  };
  const std::vector<Check> checks = {
      {"unbiased expectation", all, [](const Outcome& o) { return o.rep.unbiased(); },
       [&](const Outcome& o) { return rel(o.rep.mean, o.rep.exact_cost, 0.0); }},
      {"variance formula", all, [](const Outcome& o) { return o.rep.variance_matches(); },
       [&](const Outcome& o) {
         return rel(o.rep.variance_formula, o.rep.variance, o.rep.exact_cost * o.rep.exact_cost);
       }},
      {"CV^2 formula", all, [](const Outcome& o) { return o.rep.cv2_matches(); },
       [&](const Outcome& o) { return rel(o.rep.cv2_formula, o.rep.cv2, 1.0); }},
      {"E[alpha] = 1", all, [](const Outcome& o) { return o.rep.alpha_mean_ok(); },
       [](const Outcome& o) { return std::fabs(o.rep.alpha_mean - 1.0); }},
      {"recursive CV bound", all, [](const Outcome& o) { return o.rep.recursive_bound_holds; },
       [](const Outcome&) { return 0.0; }},
      {"CV^2 <= Var(alpha)", all, [](const Outcome& o) { return o.rep.alpha_variance_bound(); },
       [](const Outcome& o) { return o.rep.cv2 - o.rep.alpha_variance; }},
      {"CV^2 <= max alpha - 1", all, [](const Outcome& o) { return o.rep.alpha_max_bound(); },
       [](const Outcome& o) { return o.rep.cv2 - (o.rep.alpha_max - 1.0); }},
      {"CV^2 <= level-max product - 1", all, [](const Outcome& o) { return o.rep.level_max_bound(); },
       [](const Outcome& o) { return o.rep.cv2 - (o.rep.level_max_product - 1.0); }},
      {"hyperchild cost identity", all, [](const Outcome& o) { return o.rep.cost_identity_ok(); },
       [](const Outcome& o) { return o.rep.cost_identity_worst; }},
      {"zero variance with ideal importance", [](const Instance& in, const Outcome&) { return is_ideal(in); },
       [](const Outcome& o) { return o.rep.zero_variance() && o.zero_runs_ok; },
       [](const Outcome& o) {
         return std::max(o.zero_runs_worst, o.rep.variance / (o.rep.exact_cost * o.rep.exact_cost));
       }},
      {"literal enumeration agrees", [](const Instance&, const Outcome& o) { return o.literal_checked; },
       [](const Outcome& o) { return o.literal_ok; }, [](const Outcome&) { return 0.0; }},
  };

  std::vector<CheckResult> out;
  for (const auto& check : checks) {
    CheckResult r;
    r.name = check.name;
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const Outcome& o = results[i];
      if (!o.error.empty()) {
        if (r.passed) {
          r.passed = false;
          r.counterexample = instances[i].name + " B=" + std::to_string(instances[i].budget) + ": " + o.error;
        }
        continue;
      }
      if (!check.applies(instances[i], o)) continue;
      ++r.instances;
      worst = std::max(worst, check.discrepancy(o));
      if (!check.pass(o) && r.passed) {
        r.passed = false;
        r.counterexample = describe_instance(o.rep, instances[i].poset ? &*instances[i].poset : nullptr);
        if (!o.literal_detail.empty()) r.counterexample += "\n" + o.literal_detail;
      }
    }
    if (r.instances > 0) r.detail = "worst " + format_double(worst);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace secount
