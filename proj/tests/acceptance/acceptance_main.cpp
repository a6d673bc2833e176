// Acceptance run: one PASS/FAIL line per criterion with its runtime.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "secount/analysis.hpp"
#include "secount/distributions.hpp"
#include "secount/estimators.hpp"
#include "secount/experiments.hpp"
#include "secount/explicit_tree.hpp"
#include "secount/le_tree.hpp"
#include "secount/poset.hpp"
#include "secount/rng.hpp"
#include "secount/run_many.hpp"
#include "secount/verify.hpp"

using namespace secount;

namespace {

constexpr std::uint64_t kSeed = 20240601;

constexpr double kExactTol = 1e-9;       // AC2, AC3, AC5 (relative)
constexpr double kAlphaMeanTol = 1e-12;  // AC4
constexpr double kSeMultiple = 3.0;      // AC6
constexpr std::size_t kAc6Required = 19;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// AC1 --------------------------------------------------------------------

Verdict ac1() {
  std::ostringstream why;
  bool ok = true;
  const ExplicitTree t = example_tree();

  const double cost = exact_forest_cost(t);
  if (cost != 14.0) ok = false, why << " cost=" << fmt(cost);

  auto script = [] { return ChoiceSource::scripted(hypernode_script({{"b", "c"}, {"d", "e"}, {"h", "i"}, {"m"}})); };
  auto c1 = script();
  const double sep = sep_estimate(t, 2, UniformDistribution{}, c1);
  if (sep != 12.75 || !c1.exhausted()) ok = false, why << " sep=" << fmt(sep);

  auto c2 = script();
  Trajectory<ExplicitTree::Node> traj;
  const double sei = sei_estimate(t, 2, example_tree_importance(), c2, &traj);
  if (sei != 13.0 || !c2.exhausted()) ok = false, why << " sei=" << fmt(sei);
  if (traj.products != std::vector<double>{2.0, 2.5, 5.0, 2.5}) ok = false, why << " D products differ";

  const Poset p = example_poset();
  const std::string dp = to_string(count_linear_extensions(p));
  const double tree = exact_forest_cost(LinearExtensionTree(p));
  if (dp != "7" || tree != 7.0) ok = false, why << " le dp=" << dp << " tree=" << fmt(tree);

  if (ok) why << "cost 14, SEP 12.75, SEI 13 (D 2,2.5,5,2.5), LE 7/7";
  return {ok, why.str()};
}

// AC2-AC4 share one instance set --------------------------------------------

std::vector<InstanceReport> small_instances() {
  std::vector<InstanceReport> out;
  const ExplicitTree t = example_tree();
  for (std::size_t b = 1; b <= 3; ++b) {
    out.push_back(analyze_tree_instance(t, b, NodeWeights{std::vector<double>(t.size(), 1.0)}, "fixture", "uniform"));
    out.push_back(analyze_tree_instance(t, b, example_tree_importance(), "fixture", "leaf-count"));
    out.push_back(analyze_tree_instance(t, b, subtree_cost_weights(t), "fixture", "ideal"));
  }
  const ImportanceKind kinds[] = {ImportanceKind::uniform, ImportanceKind::f1, ImportanceKind::f2,
                                  ImportanceKind::f3};
  for (std::size_t i = 0; i < 200; ++i) {
    const int n = 1 + static_cast<int>(i % 6);
    const double prob = (i / 6) % 2 == 0 ? 0.2 : 0.5;
    const std::uint64_t s = Rng(kSeed, {0x616332, i}).next_u64();
    const Poset p = random_poset(n, prob, s);
    const std::string name = "poset" + std::to_string(i);
    for (std::size_t b = 1; b <= 3; ++b) {
      for (ImportanceKind k : kinds) out.push_back(analyze_poset_instance(p, b, k, name));
    }
  }
  return out;
}

const std::vector<InstanceReport>& instances() {
  static const std::vector<InstanceReport> all = small_instances();
  return all;
}

std::string where(const InstanceReport& r) {
  return r.instance + " B=" + std::to_string(r.budget) + " " + r.importance;
}

Verdict ac2() {
  double worst = 0.0;
  for (const auto& r : instances()) {
    if (!close_relative(r.mean, r.exact_cost, kExactTol)) {
      return {false, where(r) + ": mean " + fmt(r.mean) + " vs " + fmt(r.exact_cost)};
    }
    worst = std::max(worst, std::fabs(r.mean - r.exact_cost) / r.exact_cost);
  }
  return {true, std::to_string(instances().size()) + " instances, worst rel err " + fmt(worst)};
}

Verdict ac3() {
  double worst = 0.0;
  for (const auto& r : instances()) {
    const double c2 = r.exact_cost * r.exact_cost;
    if (!close_relative(r.variance_formula, r.variance, kExactTol, c2) ||
        !close_relative(r.cv2_formula, r.cv2, kExactTol, 1.0)) {
      return {false, where(r) + ": variance " + fmt(r.variance_formula) + " vs " + fmt(r.variance)};
    }
    worst = std::max(worst, std::fabs(r.variance_formula - r.variance) / std::max(c2, std::fabs(r.variance)));
  }
  return {true, std::to_string(instances().size()) + " instances, worst rel err " + fmt(worst)};
}

Verdict ac4() {
  std::size_t raw_reversals = 0;
  double worst_excess = 0.0;
  for (const auto& r : instances()) {
    const bool ok = r.alpha_defined && std::fabs(r.alpha_mean - 1.0) <= kAlphaMeanTol &&
                    holds_le(r.cv2, r.alpha_variance) && holds_le(r.cv2, r.alpha_max - 1.0) &&
                    holds_le(r.cv2, r.level_max_product - 1.0) && r.recursive_bound_holds &&
                    r.cost_identity_ok();
    if (!ok) {
      return {false, where(r) + ": E[alpha]=" + fmt(r.alpha_mean) + " cv2=" + fmt(r.cv2) + " var(alpha)=" +
                         fmt(r.alpha_variance) + " max=" + fmt(r.alpha_max) + " lmp=" + fmt(r.level_max_product)};
    }
    const double excess =
        std::max({r.cv2 - r.alpha_variance, r.cv2 - (r.alpha_max - 1.0), r.cv2 - (r.level_max_product - 1.0)});
    if (excess > 0.0) ++raw_reversals, worst_excess = std::max(worst_excess, excess);
  }
  return {true, std::to_string(instances().size()) + " instances; " + std::to_string(raw_reversals) +
                    " raw reversals inside rounding slack, largest " + fmt(worst_excess)};
}

// AC5 --------------------------------------------------------------------

Verdict ac5() {
  constexpr std::size_t kRuns = 1000;
  double worst = 0.0;
  std::size_t estimates = 0;
  auto check = [&](const auto& t, const auto& r, double exact, std::size_t b, std::uint64_t stream,
                   const std::string& name) -> std::string {
    std::vector<double> xs;
    run_many([&](ChoiceSource& c) { return sei_estimate(t, b, r, c); }, RunConfig{kRuns, kSeed, 0, stream}, &xs);
    for (double x : xs) {
      ++estimates;
      worst = std::max(worst, std::fabs(x - exact) / exact);
      if (!close_relative(x, exact, kExactTol)) return name + ": estimate " + fmt(x) + " vs " + fmt(exact);
    }
    return {};
  };
  const ExplicitTree t = example_tree();
  for (std::size_t b = 1; b <= 3; ++b) {
    const auto bad = check(t, subtree_cost_weights(t), 14.0, b, 0x6163350000 + b, "fixture B=" + std::to_string(b));
    if (!bad.empty()) return {false, bad};
  }
  for (std::size_t i = 0; i < 50; ++i) {
    const int n = 3 + static_cast<int>(i % 6);
    const Poset p = random_poset(n, 0.3, Rng(kSeed, {0x616335, i}).next_u64());
    const LinearExtensionTree le(p);
    const std::size_t b = 1 + i % 4;
    const auto bad = check(le, LeImportance(le, ImportanceKind::ideal), to_double(count_linear_extensions(p)), b, i,
                           "poset" + std::to_string(i) + " n=" + std::to_string(n));
    if (!bad.empty()) return {false, bad};
  }
  return {true, std::to_string(estimates) + " estimates, worst rel err " + fmt(worst)};
}

// AC6 --------------------------------------------------------------------

Verdict ac6() {
  constexpr int kN = 12;
  constexpr std::size_t kBudget = 5, kRuns = 100000;
  std::size_t within = 0;
  double worst_z = 0.0;
  for (std::size_t i = 0; i < 20; ++i) {
    const Poset p = random_poset(kN, 0.2, poset_seed(kSeed, kN, i));
    const LinearExtensionTree t(p);
    const LeImportance f3(t, ImportanceKind::f3);
    const double exact = to_double(count_linear_extensions(p));
    const RunSummary s =
        run_many([&](ChoiceSource& c) { return sei_estimate(t, kBudget, f3, c); }, RunConfig{kRuns, kSeed, 0, i});
    const double z = s.standard_error > 0.0 ? std::fabs(s.mean - exact) / s.standard_error
                                            : (s.mean == exact ? 0.0 : INFINITY);
    worst_z = std::max(worst_z, z);
    if (z <= kSeMultiple) ++within;
  }
  return {within >= kAc6Required,
          std::to_string(within) + "/20 within " + fmt(kSeMultiple) + " SE, worst |z| " + fmt(worst_z)};
}

// AC7 --------------------------------------------------------------------

Verdict ac7() {
  SweepConfig cfg;
  cfg.kind = SweepKind::over_n;
  cfg.n_values = {10, 15, 20};
  cfg.budgets = {5};
  cfg.posets = 64;
  cfg.estimates = 256;
  cfg.seed = kSeed;
  cfg.threads = 0;
  const auto rows = run_sweep(cfg);
  std::ostringstream os;
  bool ok = true;
  for (int n : cfg.n_values) {
    double v[4] = {NAN, NAN, NAN, NAN};
    for (const auto& r : rows) {
      if (r.n == n) v[static_cast<int>(r.importance)] = r.mean_rel_var;
    }
    const double u = v[static_cast<int>(ImportanceKind::uniform)];
    const double f1 = v[static_cast<int>(ImportanceKind::f1)];
    const double f2 = v[static_cast<int>(ImportanceKind::f2)];
    const double f3 = v[static_cast<int>(ImportanceKind::f3)];
    if (!(f2 < u) || !(f3 < u)) ok = false;
    os << (n == cfg.n_values.front() ? "" : "; ") << "n=" << n << " u " << fmt(u) << " f1 " << fmt(f1) << " f2 "
       << fmt(f2) << " f3 " << fmt(f3);
  }
  return {ok, os.str()};
}

// AC8 --------------------------------------------------------------------

Verdict ac8() {
  SweepConfig cfg;
  cfg.kind = SweepKind::over_budget;
  cfg.n_values = {9};
  cfg.budgets = {1, 2, 3, 4, 5};
  cfg.posets = 16;
  cfg.estimates = 200;
  cfg.seed = kSeed;
  auto csv = [&](unsigned threads) {
    cfg.threads = threads;
    std::ostringstream os;
    write_sweep_csv(os, run_sweep(cfg));
    return os.str();
  };
  const std::string ref = csv(1);
  for (unsigned th : {2u, 3u, 8u, 0u}) {
    if (csv(th) != ref) return {false, "CSV differs at threads=" + std::to_string(th)};
  }
  return {true, "threads 1,2,3,8,auto identical (" + std::to_string(ref.size()) + " bytes)"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},
      {"AC5", ac5}, {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8},
  };
  // Time limits in seconds; zero means none.
  const double limits[] = {1, 120, 0, 0, 0, 300, 900, 0};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (limits[i] > 0 && secs > limits[i]) {
      o.pass = false;
      o.detail += " (over " + fmt(limits[i]) + " s limit)";
    }
    if (!o.pass) ++failed;
    std::printf("%s %s %.3fs %s\n", criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
