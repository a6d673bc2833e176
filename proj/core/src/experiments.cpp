#include "secount/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "secount/csv.hpp"
#include "secount/estimators.hpp"
#include "secount/parallel.hpp"
#include "secount/poset.hpp"
#include "secount/rng.hpp"
#include "secount/run_many.hpp"

namespace secount {

namespace {

constexpr std::uint64_t kPosetTag = 0x706f73;  // "pos"
constexpr std::uint64_t kRunTag = 0x72756e;    // "run"
constexpr int kMaxVerifyElements = 9;

// f3 with a tally of how often the guard replaced the denominator.
struct CountingImportance {
  const LinearExtensionTree* tree;
  ImportanceKind kind;
  std::size_t* evaluations;
  std::size_t* guard_hits;

  double operator()(const LinearExtensionTree::Node& v) const {
    const NodeFeatures f = features(*tree, v);
    ++*evaluations;
    if (kind == ImportanceKind::f3 && f3_guard_hit(f)) ++*guard_hits;
    return importance_value(kind, f);
  }
};

struct CellResult {
  double rel_var = 0.0;
  bool zero_mean = false;
  std::size_t evaluations = 0;
  std::size_t guard_hits = 0;
  bool verified = false;
  bool verify_failed = false;
  double seconds = 0.0;
};

template <class Importance>
CellResult run_cell(const LinearExtensionTree& tree, std::size_t budget, const Importance& r, std::uint64_t seed,
                    int n, std::size_t poset_index, std::size_t runs, const std::optional<double>& denominator,
                    const std::optional<double>& check) {
  std::vector<double> estimates(runs);
  const auto roots = tree.roots();
  for (std::size_t i = 0; i < runs; ++i) {
    ChoiceSource c = ChoiceSource::random(
        Rng(seed, {kRunTag, static_cast<std::uint64_t>(n), budget, poset_index, i}));
    estimates[i] = sei_estimate(tree, std::span<const LinearExtensionTree::Node>(roots), budget, r, c);
  }
  const RunSummary s = summarize(estimates);
  CellResult out;
  const double denom = denominator ? *denominator : s.mean;
  if (denom == 0.0) {
    out.zero_mean = true;
  } else {
    out.rel_var = s.variance / (denom * denom);
  }
  if (check) {
    out.verified = true;
    const double err = std::fabs(s.mean - *check);
    out.verify_failed = err > 5.0 * s.standard_error + 1e-9 * *check;
  }
  return out;
}

}  // namespace

std::string_view to_string(SweepKind k) { return k == SweepKind::over_n ? "n" : "B"; }

void validate(const SweepConfig& cfg) {
  auto increasing = [](const auto& v) { return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end(); };
  if (cfg.n_values.empty()) throw std::invalid_argument("no poset sizes given");
  if (cfg.budgets.empty()) throw std::invalid_argument("no budgets given");
  if (!increasing(cfg.n_values)) throw std::invalid_argument("poset sizes must be strictly increasing");
  if (!increasing(cfg.budgets)) throw std::invalid_argument("budgets must be strictly increasing");
  for (int n : cfg.n_values) {
    if (n < 1 || n > kMaxElements) throw std::invalid_argument("poset size out of range: " + std::to_string(n));
  }
  if (cfg.budgets.front() < 1) throw std::invalid_argument("budgets must be at least 1");
  if (!(cfg.edge_probability >= 0.0 && cfg.edge_probability <= 1.0)) {
    throw std::invalid_argument("edge probability must be in [0, 1]");
  }
  if (cfg.importances.empty()) throw std::invalid_argument("no importance functions given");
  for (std::size_t i = 0; i < cfg.importances.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (cfg.importances[i] == cfg.importances[j]) {
        throw std::invalid_argument("importance function listed twice: " + std::string(to_string(cfg.importances[i])));
      }
    }
  }
  if (!(cfg.scale > 0.0) || !std::isfinite(cfg.scale)) throw std::invalid_argument("scale must be positive");
  if (cfg.posets && *cfg.posets < 1) throw std::invalid_argument("posets per point must be at least 1");
  if (cfg.estimates && *cfg.estimates < 2) {
    throw std::invalid_argument("estimates per poset must be at least 2 for a sample variance");
  }
  if (cfg.exact_denominator && cfg.n_values.back() > kMaxDpElements) {
    throw std::invalid_argument("exact denominators need n <= " + std::to_string(kMaxDpElements));
  }
}

std::size_t default_replicates(int n, double scale, bool full_protocol) {
  if (full_protocol) return static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  const double x = static_cast<double>(n) / scale;
  return std::max<std::size_t>(64, static_cast<std::size_t>(std::ceil(x * x)));
}

std::uint64_t poset_seed(std::uint64_t base, int n, std::size_t index) {
  return Rng(base, {kPosetTag, static_cast<std::uint64_t>(n), index}).next_u64();
}

std::vector<SweepResultRow> run_sweep(const SweepConfig& cfg) {
  validate(cfg);
  const std::size_t nb = cfg.budgets.size();
  const std::size_t ni = cfg.importances.size();

  struct Task {
    int n;
    std::size_t poset;
    std::size_t runs;
  };
  std::vector<Task> tasks;
  std::vector<std::size_t> posets_at;  // per n index
  std::vector<std::size_t> task_begin;
  for (int n : cfg.n_values) {
    const std::size_t posets = cfg.posets.value_or(default_replicates(n, cfg.scale, cfg.full_protocol));
    const std::size_t runs = cfg.estimates.value_or(std::max<std::size_t>(2, default_replicates(n, cfg.scale, cfg.full_protocol)));
    posets_at.push_back(posets);
    task_begin.push_back(tasks.size());
    for (std::size_t k = 0; k < posets; ++k) tasks.push_back({n, k, runs});
  }

  // cells[task][budget][importance]
  std::vector<std::vector<CellResult>> cells(tasks.size(), std::vector<CellResult>(nb * ni));
  parallel_for(tasks.size(), cfg.threads, [&](std::size_t ti) {
    const Task& task = tasks[ti];
    const LinearExtensionTree tree(random_poset(task.n, cfg.edge_probability, poset_seed(cfg.seed, task.n, task.poset)));
    std::optional<double> exact;
    const bool verify = cfg.verify && task.n <= kMaxVerifyElements;
    if (cfg.exact_denominator || verify) exact = to_double(count_linear_extensions(tree.poset()));
    const std::optional<double> denominator = cfg.exact_denominator ? exact : std::nullopt;
    const std::optional<double> check = verify ? exact : std::nullopt;
    for (std::size_t ii = 0; ii < ni; ++ii) {
      const ImportanceKind kind = cfg.importances[ii];
      std::optional<LeImportance> ideal;
      if (kind == ImportanceKind::ideal) ideal.emplace(tree, kind);
      for (std::size_t bi = 0; bi < nb; ++bi) {
        const auto start = std::chrono::steady_clock::now();
        CellResult res;
        std::size_t evals = 0, hits = 0;
        if (ideal) {
          res = run_cell(tree, cfg.budgets[bi], *ideal, cfg.seed, task.n, task.poset, task.runs, denominator, check);
        } else {
          const CountingImportance r{&tree, kind, &evals, &hits};
          res = run_cell(tree, cfg.budgets[bi], r, cfg.seed, task.n, task.poset, task.runs, denominator, check);
        }
        res.evaluations = evals;
        res.guard_hits = hits;
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        cells[ti][bi * ni + ii] = res;
      }
    }
  });

  std::vector<SweepResultRow> rows;
  for (std::size_t nidx = 0; nidx < cfg.n_values.size(); ++nidx) {
    const int n = cfg.n_values[nidx];
    for (std::size_t bi = 0; bi < nb; ++bi) {
      for (std::size_t ii = 0; ii < ni; ++ii) {
        SweepResultRow row;
        row.kind = cfg.kind;
        row.n = n;
        row.budget = cfg.budgets[bi];
        row.importance = cfg.importances[ii];
        row.posets = posets_at[nidx];
        std::vector<double> rel;
        std::size_t evals = 0, hits = 0;
        double seconds = 0.0;
        for (std::size_t k = 0; k < row.posets; ++k) {
          const std::size_t ti = task_begin[nidx] + k;
          const CellResult& c = cells[ti][bi * ni + ii];
          row.estimates_per_poset = tasks[ti].runs;
          if (c.zero_mean) {
            ++row.zero_mean_posets;
          } else {
            rel.push_back(c.rel_var);
          }
          evals += c.evaluations;
          hits += c.guard_hits;
          seconds += c.seconds;
          if (c.verified) ++row.verified_posets;
          if (c.verify_failed) ++row.verify_failures;
        }
        if (rel.empty()) {
          row.mean_rel_var = std::numeric_limits<double>::quiet_NaN();
          row.stderr_rel_var = std::numeric_limits<double>::quiet_NaN();
        } else {
          const RunSummary s = summarize(rel);
          row.mean_rel_var = s.mean;
          row.stderr_rel_var = s.standard_error;
        }
        if (row.importance == ImportanceKind::f3 && evals > 0) {
          row.guard_fraction = static_cast<double>(hits) / static_cast<double>(evals);
        }
        if (cfg.timing) row.seconds = seconds;
        rows.push_back(row);
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const SweepResultRow& a, const SweepResultRow& b) {
    return std::tuple(a.kind, a.n, a.budget, a.importance) < std::tuple(b.kind, b.n, b.budget, b.importance);
  });
  return rows;
}

void write_sweep_csv(std::ostream& os, std::span<const SweepResultRow> rows) {
  os << kSweepCsvHeader << '\n';
  for (const auto& r : rows) {
    os << to_string(r.kind) << ',' << r.n << ',' << r.budget << ',' << to_string(r.importance) << ',' << r.posets
       << ',' << r.estimates_per_poset << ',' << format_double(r.mean_rel_var) << ','
       << format_double(r.stderr_rel_var) << ',';
    if (r.guard_fraction) os << format_double(*r.guard_fraction);
    os << ',';
    if (r.seconds) os << format_double(*r.seconds);
    os << '\n';
  }
}

void write_sweep_dat(std::ostream& os, std::span<const SweepResultRow> rows) {
  std::map<ImportanceKind, std::vector<const SweepResultRow*>> blocks;
  for (const auto& r : rows) blocks[r.importance].push_back(&r);
  auto lg = [](double x) { return x > 0.0 ? format_double(std::log10(x)) : std::string("nan"); };
  bool first = true;
  for (const auto& [kind, block] : blocks) {
    if (!first) os << "\n\n";
    first = false;
    os << "# importance " << to_string(kind) << "\n# n B log10_n log10_B mean_rel_var log10_mean_rel_var stderr\n";
    for (const SweepResultRow* r : block) {
      os << r->n << ' ' << r->budget << ' ' << lg(r->n) << ' ' << lg(static_cast<double>(r->budget)) << ' '
         << format_double(r->mean_rel_var) << ' ' << lg(r->mean_rel_var) << ' ' << format_double(r->stderr_rel_var)
         << '\n';
    }
  }
}

ImportanceComparison compare_importance(std::span<const SweepResultRow> rows) {
  std::map<std::pair<int, std::size_t>, PointRanking> points;
  for (const auto& r : rows) {
    auto& p = points[{r.n, r.budget}];
    p.n = r.n;
    p.budget = r.budget;
    p.ranking.emplace_back(r.importance, r.mean_rel_var);
  }
  ImportanceComparison c;
  std::size_t f2 = 0, f3 = 0;
  for (auto& [key, p] : points) {
    std::stable_sort(p.ranking.begin(), p.ranking.end(),
                     [](const auto& a, const auto& b) { return a.second < b.second; });
    std::optional<double> u, v2, v3;
    for (const auto& [k, v] : p.ranking) {
      if (k == ImportanceKind::uniform) u = v;
      if (k == ImportanceKind::f2) v2 = v;
      if (k == ImportanceKind::f3) v3 = v;
    }
    if (u && v2 && v3) {
      ++c.comparable_points;
      if (*v2 < *u) ++f2;
      if (*v3 < *u) ++f3;
    }
    c.points.push_back(p);
  }
  if (c.comparable_points > 0) {
    c.f2_beats_uniform = static_cast<double>(f2) / static_cast<double>(c.comparable_points);
    c.f3_beats_uniform = static_cast<double>(f3) / static_cast<double>(c.comparable_points);
  }
  return c;
}

void write_comparison(std::ostream& os, const ImportanceComparison& c) {
  for (const auto& p : c.points) {
    os << "n=" << p.n << " B=" << p.budget << ":";
    for (const auto& [k, v] : p.ranking) os << ' ' << to_string(k) << '=' << format_double(v);
    os << '\n';
  }
  os << "fraction of " << c.comparable_points << " points below uniform: f2 " << format_double(c.f2_beats_uniform)
     << ", f3 " << format_double(c.f3_beats_uniform) << '\n';
}

}  // namespace secount
