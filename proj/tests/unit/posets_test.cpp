#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "secount/errors.hpp"
#include "secount/le_tree.hpp"
#include "secount/poset.hpp"
#include "secount/tree.hpp"

using namespace secount;

namespace {

using LeNode = LinearExtensionTree::Node;

std::string data_path(const std::string& name) { return std::string(SECOUNT_TEST_DATA) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Poset parse(const std::string& text) {
  std::istringstream in(text);
  return read_poset(in);
}

// Walks every root-to-leaf path, checking the decision-tree invariants.
void check_paths(const LinearExtensionTree& t, const LeNode& v, std::vector<int>& order, std::size_t& leaves) {
  const Poset& p = t.poset();
  std::vector<LeNode> kids;
  t.append_successors(v, kids);
  ElementSet remaining;
  for (int i = 0; i < p.size(); ++i) {
    if (!v.deleted.test(i)) remaining.set(i);
  }
  ASSERT_EQ(static_cast<int>(kids.size()), p.maximal_in(remaining).count());
  if (kids.empty()) {
    ASSERT_EQ(static_cast<int>(order.size()), p.size());
    for (std::size_t a = 0; a < order.size(); ++a) {
      for (std::size_t b = a + 1; b < order.size(); ++b) ASSERT_FALSE(p.greater(order[b], order[a]));
    }
    ++leaves;
    return;
  }
  int prev = -1;
  for (const auto& k : kids) {
    ASSERT_GT(static_cast<int>(k.elem), prev);
    prev = k.elem;
    ASSERT_EQ(k.depth, v.depth + 1);
    ASSERT_EQ(static_cast<std::size_t>(k.sib), kids.size());
    const auto f = features(t, k);
    ASSERT_LE(f.desc, f.height + 1);
    ASSERT_GE(f.desc, 1);
    order.push_back(k.elem);
    check_paths(t, k, order, leaves);
    order.pop_back();
  }
}

}  // namespace

TEST(Poset, Closure) {
  const Poset p = parse("3\n0 1\n1 2\n");
  EXPECT_TRUE(p.greater(0, 1));
  EXPECT_TRUE(p.greater(1, 2));
  EXPECT_TRUE(p.greater(0, 2));
  EXPECT_FALSE(p.greater(2, 0));
  EXPECT_EQ(p.relation_count(), 3u);
  EXPECT_EQ(p, chain_poset(3));
  EXPECT_EQ(p.cover_relations(), (std::vector<std::pair<int, int>>{{0, 1}, {1, 2}}));
}

TEST(Poset, FileFormat) {
  EXPECT_EQ(parse("# just a comment\n4\n"), antichain_poset(4));
  EXPECT_THROW(parse("3\n0 1\n1 0\n"), Error);
  EXPECT_THROW(parse("3\n0 1\n1 2\n2 0\n"), Error);

  try {
    parse("3\n0 1\n0 x\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("3\n0 3\n"), ParseError);
  EXPECT_THROW(parse("3\n1 1\n"), ParseError);
  EXPECT_THROW(parse("-2\n"), ParseError);
  EXPECT_THROW(read_poset_file("/nonexistent/poset.txt"), Error);
}

TEST(Poset, RoundTrip) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Poset p = random_poset(15, 0.25, seed);
    std::ostringstream os;
    write_poset(os, p);
    EXPECT_EQ(parse(os.str()), p) << seed;
  }
}

TEST(Poset, RandomGeneration) {
  EXPECT_EQ(random_poset(9, 0.0, 1), antichain_poset(9));
  EXPECT_EQ(random_poset(9, 1.0, 1), chain_poset(9));
  EXPECT_EQ(random_poset(20, 0.2, 5), random_poset(20, 0.2, 5));
  EXPECT_NE(random_poset(20, 0.2, 5), random_poset(20, 0.2, 6));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Poset p = random_poset(30, 0.15, seed);
    for (int i = 0; i < 30; ++i) {
      EXPECT_FALSE(p.greater(i, i));
      for (int j = 0; j < 30; ++j) {
        if (p.greater(i, j)) {
          EXPECT_LT(i, j);
          for (int k = 0; k < 30; ++k) {
            if (p.greater(j, k)) EXPECT_TRUE(p.greater(i, k));
          }
        }
      }
    }
  }
}

TEST(Poset, GoldenGeneratedFile) {
  const Poset p = random_poset(40, 0.2, 7);
  std::ostringstream os;
  write_poset(os, p);
  EXPECT_EQ(os.str(), slurp(data_path("poset_n40_p02_seed7.txt")));
}

TEST(LinearExtensions, KnownCounts) {
  EXPECT_EQ(to_string(count_linear_extensions(example_poset())), "7");
  EXPECT_EQ(to_string(count_linear_extensions(antichain_poset(8))), "40320");
  EXPECT_EQ(to_string(count_linear_extensions(chain_poset(10))), "1");
  EXPECT_EQ(to_string(count_linear_extensions(antichain_poset(20))), "2432902008176640000");
  EXPECT_EQ(to_string(count_linear_extensions(Poset(1))), "1");
  EXPECT_THROW(count_linear_extensions(antichain_poset(25)), ResourceLimitError);
}

TEST(LinearExtensions, FrozenCountsFromIndependentCounter) {
  const std::vector<std::pair<std::string, std::string>> cases{
      {"random_n8.txt", "76"},
      {"random_n12.txt", "594384"},
      {"random_n16.txt", "1115538240"},
      {"random_n20.txt", "23053178610000"},
  };
  for (const auto& [file, count] : cases) {
    const Poset p = read_poset_file(data_path(file));
    EXPECT_EQ(to_string(count_linear_extensions(p)), count) << file;
  }
  EXPECT_EQ(exact_forest_cost(LinearExtensionTree(read_poset_file(data_path("random_n8.txt")))), 76.0);
}

TEST(LinearExtensions, DpMatchesTreeTraversal) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    const int n = 1 + static_cast<int>(i % 9);
    const double p = 0.1 + 0.1 * static_cast<double>(i % 5);
    const Poset poset = random_poset(n, p, 1000 + i);
    const double dp = to_double(count_linear_extensions(poset));
    EXPECT_EQ(dp, exact_forest_cost(LinearExtensionTree(poset))) << "n=" << n << " i=" << i;
  }
}

TEST(LeTree, ExampleStructure) {
  const LinearExtensionTree t(example_poset());
  const auto root = t.roots()[0];
  EXPECT_EQ(t.label(root), "root");
  std::vector<LeNode> kids;
  t.append_successors(root, kids);
  ASSERT_EQ(kids.size(), 2u);
  EXPECT_EQ(t.label(kids[0]), "a");
  EXPECT_EQ(t.label(kids[1]), "b");

  const LeNode ab = t.follow({"a", "b"});
  kids.clear();
  t.append_successors(ab, kids);
  ASSERT_EQ(kids.size(), 2u);
  EXPECT_EQ(t.label(kids[0]), "a/b/c");
  EXPECT_EQ(t.label(kids[1]), "a/b/d");
  EXPECT_THROW(t.follow({"c"}), std::invalid_argument);
  EXPECT_THROW(t.follow({"z"}), std::invalid_argument);

  std::vector<int> order;
  std::size_t leaves = 0;
  check_paths(t, root, order, leaves);
  EXPECT_EQ(leaves, 7u);
}

TEST(LeTree, StructureOnRandomPosets) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const LinearExtensionTree t(random_poset(7, 0.3, seed));
    std::vector<int> order;
    std::size_t leaves = 0;
    check_paths(t, t.roots()[0], order, leaves);
    EXPECT_EQ(static_cast<double>(leaves), to_double(count_linear_extensions(t.poset())));
  }
  std::vector<int> order;
  std::size_t leaves = 0;
  check_paths(LinearExtensionTree(chain_poset(6)), LeNode{}, order, leaves);
  EXPECT_EQ(leaves, 1u);
  leaves = 0;
  check_paths(LinearExtensionTree(antichain_poset(3)), LeNode{}, order, leaves);
  EXPECT_EQ(leaves, 6u);
}

TEST(LeTree, DistinctPathsAreDistinctNodes) {
  // Removing a then b, or b then a, reaches the same remaining poset by
  // different paths; the nodes must differ.
  const LinearExtensionTree t(antichain_poset(3));
  const LeNode ab = t.follow({"0", "1"});
  const LeNode ba = t.follow({"1", "0"});
  EXPECT_EQ(ab.deleted, ba.deleted);
  EXPECT_FALSE(ab == ba);
  EXPECT_EQ(t.subtree_key(ab), t.subtree_key(ba));
}

TEST(Importance, Values) {
  EXPECT_EQ(importance_value(ImportanceKind::f3, NodeFeatures{3, 2, 5}), 63.0);
  EXPECT_EQ(importance_value(ImportanceKind::uniform, NodeFeatures{4, 2, 5}), 1.0);
  EXPECT_EQ(importance_value(ImportanceKind::f1, NodeFeatures{4, 2, 5}), 64.0);
  EXPECT_EQ(importance_value(ImportanceKind::f2, NodeFeatures{4, 2, 5}), 128.0);
  // Guarded: height - desc below 1 uses denominator 1.
  EXPECT_TRUE(f3_guard_hit(NodeFeatures{2, 3, 3}));
  EXPECT_EQ(importance_value(ImportanceKind::f3, NodeFeatures{2, 3, 3}), 48.0);
  EXPECT_TRUE(f3_guard_hit(NodeFeatures{1, 4, 3}));
  EXPECT_EQ(importance_value(ImportanceKind::f3, NodeFeatures{1, 4, 3}), 7.0);
  EXPECT_FALSE(f3_guard_hit(NodeFeatures{1, 1, 2}));
  EXPECT_THROW(importance_value(ImportanceKind::ideal, NodeFeatures{}), std::invalid_argument);

  EXPECT_EQ(parse_importance("1"), ImportanceKind::f1);
  EXPECT_EQ(parse_importance("f3"), ImportanceKind::f3);
  EXPECT_EQ(parse_importance("uniform"), ImportanceKind::uniform);
  EXPECT_EQ(parse_importance("ideal"), ImportanceKind::ideal);
  EXPECT_FALSE(parse_importance("4").has_value());
}

TEST(Importance, FeaturesOnExample) {
  const LinearExtensionTree t(example_poset());
  // b dominates c, d and e: desc 4; root height 5, b's node height 4.
  const auto b = features(t, t.follow({"b"}));
  EXPECT_EQ(b.sib, 2);
  EXPECT_EQ(b.desc, 4);
  EXPECT_EQ(b.height, 4);
  const auto root = features(t, t.roots()[0]);
  EXPECT_EQ(root.sib, 1);
  EXPECT_EQ(root.desc, 1);
  EXPECT_EQ(root.height, 5);

  const LeImportance f3(t, ImportanceKind::f3);
  for (const auto& v : {t.follow({"a"}), t.follow({"b"}), t.follow({"a", "b", "c"})}) {
    EXPECT_GT(f3(v), 0.0);
  }
  const LeImportance ideal(t, ImportanceKind::ideal);
  EXPECT_EQ(ideal(t.roots()[0]), 7.0);
  EXPECT_EQ(ideal(t.follow({"a"})), 3.0);
}
