#include "secount/poset.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "secount/errors.hpp"
#include "secount/rng.hpp"

namespace secount {

namespace {

void check_size(int n) {
  if (n < 0 || n > kMaxElements) {
    throw std::invalid_argument("poset size must be in [0, " + std::to_string(kMaxElements) + "]");
  }
}

std::vector<std::string> default_names(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::to_string(i));
  return names;
}

}  // namespace

Poset::Poset(int n) : n_(n) {
  check_size(n);
  below_.resize(static_cast<std::size_t>(n));
  above_.resize(static_cast<std::size_t>(n));
  names_ = default_names(n);
}

Poset Poset::from_relations(int n, const std::vector<std::pair<int, int>>& greater,
                            std::vector<std::string> names) {
  Poset p(n);
  if (!names.empty()) {
    if (static_cast<int>(names.size()) != n) throw std::invalid_argument("need one name per element");
    p.names_ = std::move(names);
  }
  for (const auto& [i, j] : greater) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw std::invalid_argument("relation " + std::to_string(i) + " > " + std::to_string(j) + " out of range");
    }
    if (i == j) throw Error("relation cycle: element " + std::to_string(i) + " above itself");
    p.below_[i].set(j);
  }
  p.close();
  return p;
}

void Poset::close() {
  // Warshall on bit rows.
  for (int k = 0; k < n_; ++k) {
    for (int i = 0; i < n_; ++i) {
      if (below_[i].test(k)) below_[i] |= below_[k];
    }
  }
  for (int i = 0; i < n_; ++i) {
    if (below_[i].test(i)) throw Error("relation cycle through element " + std::to_string(i));
  }
  for (auto& a : above_) a = ElementSet{};
  for (int i = 0; i < n_; ++i) {
    below_[i].for_each([&](int j) { above_[j].set(i); });
  }
}

std::size_t Poset::relation_count() const {
  std::size_t c = 0;
  for (const auto& b : below_) c += static_cast<std::size_t>(b.count());
  return c;
}

std::vector<std::pair<int, int>> Poset::cover_relations() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n_; ++i) {
    // j is covered by i unless some k with i > k > j exists
    ElementSet implied;
    below_[i].for_each([&](int k) { implied |= below_[k]; });
    (below_[i] - implied).for_each([&](int j) { out.emplace_back(i, j); });
  }
  return out;
}

ElementSet Poset::maximal_in(const ElementSet& remaining) const {
  ElementSet out;
  remaining.for_each([&](int i) {
    if (!above_[i].intersects(remaining)) out.set(i);
  });
  return out;
}

Poset random_poset(int n, double p, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("poset size must be at least 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("edge probability must be in [0, 1]");
  Rng rng(seed, {0x706f736574, static_cast<std::uint64_t>(n)});
  std::vector<std::pair<int, int>> rel;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.uniform() < p) rel.emplace_back(i, j);
    }
  }
  return Poset::from_relations(n, rel);
}

Poset chain_poset(int n) {
  std::vector<std::pair<int, int>> rel;
  for (int i = 0; i + 1 < n; ++i) rel.emplace_back(i, i + 1);
  return Poset::from_relations(n, rel);
}

Poset antichain_poset(int n) { return Poset(n); }

Poset example_poset() {
  return Poset::from_relations(5, {{0, 2}, {1, 2}, {1, 3}, {2, 4}}, {"a", "b", "c", "d", "e"});
}

Poset read_poset(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  int n = -1;
  std::vector<std::pair<int, int>> rel;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (n < 0) {
      if (!(ls >> n) || n < 0 || n > kMaxElements) {
        throw ParseError(lineno, "expected element count in [0, " + std::to_string(kMaxElements) + "]");
      }
    } else {
      long long i = 0, j = 0;
      if (!(ls >> i >> j)) throw ParseError(lineno, "expected two element indices");
      if (i < 0 || j < 0 || i >= n || j >= n) throw ParseError(lineno, "element index out of range");
      if (i == j) throw ParseError(lineno, "element related to itself");
      rel.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
    std::string rest;
    if (ls >> rest && rest[0] != '#') throw ParseError(lineno, "unexpected trailing text '" + rest + "'");
  }
  if (n < 0) throw ParseError(lineno, "missing element count");
  return Poset::from_relations(n, rel);
}

Poset read_poset_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open poset file '" + path.string() + "'");
  return read_poset(in);
}

void write_poset(std::ostream& out, const Poset& p) {
  out << "# poset: first line n, then i j meaning v_i > v_j\n" << p.size() << '\n';
  for (const auto& [i, j] : p.cover_relations()) out << i << ' ' << j << '\n';
}

void write_poset_file(const std::filesystem::path& path, const Poset& p) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write poset file '" + path.string() + "'");
  write_poset(out, p);
  if (!out) throw Error("error writing poset file '" + path.string() + "'");
}

LeCount count_linear_extensions(const Poset& p) {
  const int n = p.size();
  if (n > kMaxDpElements) {
    throw ResourceLimitError("dynamic-programming count supports at most " + std::to_string(kMaxDpElements) +
                             " elements");
  }
  // N(S) for removed sets S of one size at a time; removing a maximal element
  // of the remainder keeps S an up-set.
  std::vector<std::uint32_t> above(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) above[i] = static_cast<std::uint32_t>(p.above(i).word(0));
  std::unordered_map<std::uint32_t, LeCount> level{{0U, 1}}, next;
  for (int k = 0; k < n; ++k) {
    next.clear();
    next.reserve(level.size() * 2);
    for (const auto& [removed, count] : level) {
      for (int e = 0; e < n; ++e) {
        const std::uint32_t bit = std::uint32_t{1} << e;
        if ((removed & bit) == 0 && (above[e] & ~removed) == 0) next[removed | bit] += count;
      }
    }
    level.swap(next);
  }
  return level.empty() ? 0 : level.begin()->second;
}

std::string to_string(LeCount x) {
  if (x == 0) return "0";
  std::string s;
  while (x > 0) {
    s += static_cast<char>('0' + static_cast<int>(x % 10));
    x /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

double to_double(LeCount x) { return static_cast<double>(x); }

}  // namespace secount
