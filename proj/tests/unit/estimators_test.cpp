#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <vector>

#include "secount/distributions.hpp"
#include "secount/errors.hpp"
#include "secount/estimators.hpp"
#include "secount/explicit_tree.hpp"
#include "secount/le_tree.hpp"
#include "secount/poset.hpp"
#include "secount/run_many.hpp"

using namespace secount;

namespace {

using Node = ExplicitTree::Node;

ExplicitTree chain_tree(std::size_t height) {
  std::vector<std::vector<std::uint32_t>> children(height + 1);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i <= height; ++i) {
    if (i < height) children[i] = {static_cast<std::uint32_t>(i + 1)};
    labels.push_back("c" + std::to_string(i));
  }
  return ExplicitTree(children, std::vector<double>(height + 1, 1.0), labels, {0});
}

NodeWeights unit_weights(const ExplicitTree& t) { return NodeWeights{std::vector<double>(t.size(), 1.0)}; }

}  // namespace

TEST(Sep, ScriptedUniformReplay) {
  const ExplicitTree t = example_tree();
  auto c = ChoiceSource::scripted(hypernode_script({{"b", "c"}, {"d", "e"}, {"h", "i"}, {"m"}}));
  Trajectory<Node> traj;
  const double est = sep_estimate(t, 2, UniformDistribution{}, c, &traj);
  EXPECT_EQ(est, 12.75);
  EXPECT_TRUE(c.exhausted());
  ASSERT_EQ(traj.hypernodes.size(), 5u);
  EXPECT_EQ(traj.tau, 4u);
  // Uniform D_k = |S(x_k)| / |x_k|.
  EXPECT_EQ(traj.factors, (std::vector<double>{2.0, 1.5, 1.5, 0.5}));
  EXPECT_EQ(traj.products, (std::vector<double>{2.0, 3.0, 4.5, 2.25}));
  EXPECT_DOUBLE_EQ(traj.probabilities[1], 1.0 / 3.0);
  EXPECT_NEAR(traj.log_product, std::log(2.25), 1e-15);
}

TEST(Sei, ScriptedLeafCountReplay) {
  const ExplicitTree t = example_tree();
  auto c = ChoiceSource::scripted(hypernode_script({{"b", "c"}, {"d", "e"}, {"h", "i"}, {"m"}}));
  Trajectory<Node> traj;
  const double est = sei_estimate(t, 2, example_tree_importance(), c, &traj);
  EXPECT_EQ(est, 13.0);
  EXPECT_EQ(traj.products, (std::vector<double>{2.0, 2.5, 5.0, 2.5}));
  // First draw picks b with weight 2 of 5 among S = {b, c}; forced pair.
  EXPECT_EQ(traj.probabilities[0], 1.0);
}

TEST(Knuth, ScriptedPath) {
  const ExplicitTree t = example_tree();
  auto c = ChoiceSource::scripted(hypernode_script({{"c"}, {"f"}, {"j"}, {"n"}}));
  Trajectory<Node> traj;
  const double est = knuth_estimate(t, t.find("a"), UniformDistribution{}, c, &traj);
  EXPECT_EQ(est, 15.0);
  EXPECT_EQ(traj.factors, (std::vector<double>{2.0, 2.0, 1.0, 1.0}));

  // Same path through the hypernode estimator at budget 1.
  auto c2 = ChoiceSource::scripted(hypernode_script({{"c"}, {"f"}, {"j"}, {"n"}}));
  EXPECT_EQ(sei_estimate(t, 1, unit_weights(t), c2), 15.0);
}

TEST(Knuth, TrivialTrees) {
  const ExplicitTree single({{}}, {2.5}, {"v"}, {0});
  auto c = ChoiceSource::random(1);
  EXPECT_EQ(knuth_estimate(single, Node{0}, UniformDistribution{}, c), 2.5);
  EXPECT_EQ(sep_estimate(single, 3, UniformDistribution{}, c), 2.5);

  const ExplicitTree chain = chain_tree(9);
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto r = ChoiceSource::random(s);
    EXPECT_EQ(knuth_estimate(chain, Node{0}, UniformDistribution{}, r), 10.0);
  }
}

TEST(Sei, NonpositiveImportanceNamesNode) {
  const ExplicitTree t = example_tree();
  NodeWeights r = unit_weights(t);
  r.weights[t.find("e").index] = 0.0;
  auto c = ChoiceSource::scripted(hypernode_script({{"b", "c"}, {"d", "e"}, {"h", "i"}, {"m"}}));
  try {
    sei_estimate(t, 2, r, c);
    FAIL() << "expected EstimatorError";
  } catch (const EstimatorError& e) {
    EXPECT_NE(std::string(e.what()).find("'e'"), std::string::npos) << e.what();
  }
}

TEST(Sei, BudgetCoveringWidthsIsExact) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ExplicitTree t = random_tree(50, 4, seed, true, 0.1);
    const double exact = exact_forest_cost(t);
    for (std::uint64_t s = 0; s < 5; ++s) {
      auto c = ChoiceSource::random(s);
      EXPECT_NEAR(sei_estimate(t, 50, leaf_count_weights(t), c), exact, 1e-12 * exact);
    }
  }
}

TEST(Sei, MatchesSepWithImportanceDistribution) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ExplicitTree t = random_tree(70, 4, seed, true, 0.05);
    const NodeWeights r = leaf_count_weights(t);
    const ImportanceDistribution<NodeWeights> dist(r);
    for (std::size_t b = 1; b <= 3; ++b) {
      for (std::uint64_t s = 0; s < 10; ++s) {
        auto c1 = ChoiceSource::random(Rng(s, {seed, b}));
        auto c2 = ChoiceSource::random(Rng(s, {seed, b}));
        Trajectory<Node> t1, t2;
        const double a = sei_estimate(t, b, r, c1, &t1);
        const double d = sep_estimate(t, b, dist, c2, &t2);
        EXPECT_EQ(a, d);
        EXPECT_EQ(t1.hypernodes, t2.hypernodes);
        EXPECT_EQ(t1.factors, t2.factors);
      }
    }
  }
}

TEST(Sei, UniformImportanceMatchesUniformSep) {
  const LinearExtensionTree t(random_poset(9, 0.2, 3));
  const LeImportance unit(t, ImportanceKind::uniform);
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto c1 = ChoiceSource::random(s);
    auto c2 = ChoiceSource::random(s);
    EXPECT_EQ(sei_estimate(t, 3, unit, c1), sep_estimate(t, 3, UniformDistribution{}, c2));
  }
}

TEST(Sei, BudgetOneMatchesKnuth) {
  const LinearExtensionTree t(random_poset(10, 0.2, 5));
  const LeImportance f2(t, ImportanceKind::f2);
  const ImportanceDistribution<const LeImportance&> dist(f2);
  const auto root = t.roots()[0];
  for (std::uint64_t s = 0; s < 50; ++s) {
    auto c1 = ChoiceSource::random(s);
    auto c2 = ChoiceSource::random(s);
    EXPECT_EQ(sei_estimate(t, 1, f2, c1), knuth_estimate(t, root, dist, c2));
  }
}

TEST(Sei, IdealImportanceHasZeroVariance) {
  const ExplicitTree t = example_tree();
  const NodeWeights ideal = subtree_cost_weights(t);
  for (std::size_t b = 1; b <= 3; ++b) {
    const RunSummary s = run_many(
        [&](ChoiceSource& c) { return sei_estimate(t, b, ideal, c); }, RunConfig{1000, 17, 1, b});
    EXPECT_NEAR(s.mean, 14.0, 1e-12 * 14.0);
    EXPECT_LE(s.variance, 1e-12 * 196.0);
  }

  const LinearExtensionTree le(random_poset(8, 0.3, 9));
  const double exact = to_double(count_linear_extensions(le.poset()));
  const IdealImportance<LinearExtensionTree> r(le);
  for (std::uint64_t s = 0; s < 200; ++s) {
    auto c = ChoiceSource::random(s);
    EXPECT_NEAR(sei_estimate(le, 2, r, c), exact, 1e-9 * exact);
  }
}

TEST(Sep, IdealCostDistributionHasZeroVariance) {
  const LinearExtensionTree t(random_poset(7, 0.2, 4));
  const auto table = std::make_shared<const SubtreeCostTable<LinearExtensionTree>>(t);
  const auto dist = ideal_cost_distribution(t, table);
  const double exact = exact_forest_cost(t);
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto c = ChoiceSource::random(s);
    EXPECT_NEAR(sep_estimate(t, 3, dist, c), exact, 1e-9 * exact);
  }
}

TEST(RunMany, Summary) {
  const ExplicitTree t = example_tree();
  const NodeWeights unit = unit_weights(t);
  auto one = [&](ChoiceSource& c) { return sei_estimate(t, 2, unit, c); };

  const RunSummary single = run_many(one, RunConfig{1, 1, 1, 0});
  EXPECT_EQ(single.runs, 1u);
  EXPECT_FALSE(single.variance_defined);
  EXPECT_FALSE(single.relative_defined);
  EXPECT_THROW(run_many(one, RunConfig{0, 1, 1, 0}), std::invalid_argument);

  const RunSummary s = run_many(one, RunConfig{100000, 1, 0, 0});
  EXPECT_LT(std::fabs(s.mean - 14.0), 3.0 * s.standard_error);
  EXPECT_NEAR(s.relative_variance, s.variance / (s.mean * s.mean), 1e-15);
}

TEST(RunMany, IndependentOfThreadCount) {
  const LinearExtensionTree t(random_poset(12, 0.2, 8));
  const LeImportance f3(t, ImportanceKind::f3);
  auto one = [&](ChoiceSource& c) { return sei_estimate(t, 3, f3, c); };
  std::vector<double> e1, e4;
  const RunSummary a = run_many(one, RunConfig{2000, 5, 1, 0}, &e1);
  const RunSummary b = run_many(one, RunConfig{2000, 5, 4, 0}, &e4);
  EXPECT_EQ(e1, e4);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.variance, b.variance);
}

TEST(RunMany, ErrorsCarryRunContext) {
  auto fail = [](ChoiceSource& c) -> double {
    if (c.rng().uniform() < 2.0) throw EstimatorError("boom");
    return 0.0;
  };
  try {
    run_many(fail, RunConfig{10, 3, 2, 0});
    FAIL() << "expected EstimatorError";
  } catch (const EstimatorError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("run 0"), std::string::npos) << what;
    EXPECT_NE(what.find("boom"), std::string::npos) << what;
  }
}

TEST(Summarize, KnownValues) {
  const std::vector<double> xs{1, 2, 3, 4};
  const RunSummary s = summarize(xs);
  EXPECT_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.variance, 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.standard_error, std::sqrt(5.0 / 12.0));
  const std::vector<double> zeros{0, 0, 0};
  EXPECT_FALSE(summarize(zeros).relative_defined);
}
