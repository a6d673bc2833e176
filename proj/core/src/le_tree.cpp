#include "secount/le_tree.hpp"

#include <stdexcept>

namespace secount {

LinearExtensionTree::LinearExtensionTree(Poset p)
    : poset_(std::make_shared<const Poset>(std::move(p))), n_(poset_->size()) {
  if (n_ >= kNoElement) throw std::invalid_argument("decision tree supports fewer than 255 elements");
  desc_.resize(static_cast<std::size_t>(n_));
  for (int e = 0; e < n_; ++e) desc_[e] = poset_->below(e).count() + 1;
}

void LinearExtensionTree::append_successors(const Node& v, std::vector<Node>& out) const {
  if (v.depth == n_) return;
  const ElementSet maximal = poset_->maximal_in(ElementSet::first(n_) - v.deleted);
  const int count = maximal.count();
  int idx = 0;
  maximal.for_each([&](int e) {
    Node c;
    c.deleted = v.deleted;
    c.deleted.set(e);
    c.rank = v.rank + static_cast<uint128>(idx) * v.radix;
    c.radix = v.radix * static_cast<uint128>(count);
    c.elem = static_cast<std::uint8_t>(e);
    c.depth = static_cast<std::uint8_t>(v.depth + 1);
    c.sib = static_cast<std::uint16_t>(count);
    out.push_back(c);
    ++idx;
  });
}

std::string LinearExtensionTree::label(const Node& v) const {
  if (v.depth == 0) return "root";
  if (n_ > kExactRankElements) {
    // rank may have wrapped; name the last step only
    return "..." + poset_->name(v.elem) + "@" + std::to_string(v.depth);
  }
  std::string s;
  ElementSet deleted;
  uint128 rank = v.rank;
  for (int d = 0; d < v.depth; ++d) {
    const ElementSet maximal = poset_->maximal_in(ElementSet::first(n_) - deleted);
    const auto count = static_cast<uint128>(maximal.count());
    auto idx = static_cast<int>(rank % count);
    rank /= count;
    int chosen = -1;
    maximal.for_each([&](int e) {
      if (idx-- == 0) chosen = e;
    });
    deleted.set(chosen);
    if (!s.empty()) s += '/';
    s += poset_->name(chosen);
  }
  return s;
}

LinearExtensionTree::Node LinearExtensionTree::follow(const std::vector<std::string_view>& names) const {
  Node v = roots().front();
  std::vector<Node> kids;
  for (auto name : names) {
    kids.clear();
    append_successors(v, kids);
    bool found = false;
    for (const auto& c : kids) {
      if (poset_->name(c.elem) == name) {
        v = c;
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("element '" + std::string(name) + "' is not maximal here");
  }
  return v;
}

NodeFeatures features(const LinearExtensionTree& t, const LinearExtensionTree::Node& v) {
  NodeFeatures f;
  f.height = t.size() - v.depth;
  if (v.elem != LinearExtensionTree::kNoElement) {
    f.sib = v.sib;
    f.desc = t.desc(v.elem);
  }
  return f;
}

std::string_view to_string(ImportanceKind k) {
  switch (k) {
    case ImportanceKind::uniform: return "uniform";
    case ImportanceKind::f1: return "f1";
    case ImportanceKind::f2: return "f2";
    case ImportanceKind::f3: return "f3";
    case ImportanceKind::ideal: return "ideal";
  }
  return "?";
}

std::optional<ImportanceKind> parse_importance(std::string_view s) {
  if (s == "uniform") return ImportanceKind::uniform;
  if (s == "1" || s == "f1") return ImportanceKind::f1;
  if (s == "2" || s == "f2") return ImportanceKind::f2;
  if (s == "3" || s == "f3") return ImportanceKind::f3;
  if (s == "ideal") return ImportanceKind::ideal;
  return std::nullopt;
}

double importance_value(ImportanceKind k, const NodeFeatures& f) {
  const double s3 = static_cast<double>(f.sib) * f.sib * f.sib;
  switch (k) {
    case ImportanceKind::uniform: return 1.0;
    case ImportanceKind::f1: return s3;
    case ImportanceKind::f2: return s3 * f.desc;
    case ImportanceKind::f3: {
      const int denom = f3_guard_hit(f) ? 1 : f.height - f.desc;
      return s3 * static_cast<double>(f.height + f.desc) / static_cast<double>(denom);
    }
    case ImportanceKind::ideal: break;
  }
  throw std::invalid_argument("ideal importance needs exact subtree costs");
}

LeImportance::LeImportance(const LinearExtensionTree& t, ImportanceKind kind) : tree_(&t), kind_(kind) {
  if (kind == ImportanceKind::ideal) costs_ = std::make_shared<const SubtreeCostTable<LinearExtensionTree>>(t);
}

double LeImportance::operator()(const LinearExtensionTree::Node& v) const {
  if (kind_ == ImportanceKind::ideal) return costs_->cost(*tree_, v);
  return importance_value(kind_, features(*tree_, v));
}

}  // namespace secount
