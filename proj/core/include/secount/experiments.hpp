#pragma once

// Relative-variance sweeps of the importance sampling estimator on random
// posets, over poset size or over budget.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "secount/le_tree.hpp"

namespace secount {

enum class SweepKind { over_n, over_budget };

std::string_view to_string(SweepKind k);

struct SweepConfig {
  SweepKind kind = SweepKind::over_n;
  std::vector<int> n_values{10};          // strictly increasing; the swept axis for over_n
  std::vector<std::size_t> budgets{5};    // strictly increasing; the swept axis for over_budget
  double edge_probability = 0.2;
  std::vector<ImportanceKind> importances{ImportanceKind::uniform, ImportanceKind::f1, ImportanceKind::f2,
                                          ImportanceKind::f3};
  std::uint64_t seed = 1;
  double scale = 1.0;          // replicates default to max(64, ceil((n / scale)^2))
  bool full_protocol = false;  // n^2 posets and n^2 estimates per poset
  std::optional<std::size_t> posets;     // overrides the per-point poset count
  std::optional<std::size_t> estimates;  // overrides the per-poset estimate count
  bool exact_denominator = false;        // divide by the exact count squared (n <= 24)
  bool verify = false;                   // check estimate means against exact counts (n <= 9)
  bool timing = false;                   // fill the seconds column
  unsigned threads = 1;                  // 0 = hardware concurrency
};

/// Throws std::invalid_argument describing the first problem found.
void validate(const SweepConfig& cfg);

/// Replicate count for poset size n under the given scale.
std::size_t default_replicates(int n, double scale, bool full_protocol);

struct SweepResultRow {
  SweepKind kind = SweepKind::over_n;
  int n = 0;
  std::size_t budget = 0;
  ImportanceKind importance = ImportanceKind::uniform;
  std::size_t posets = 0;
  std::size_t estimates_per_poset = 0;
  double mean_rel_var = 0.0;   // NaN when every poset had a zero sample mean
  double stderr_rel_var = 0.0; // standard error of that mean across posets
  std::optional<double> guard_fraction;  // f3 only
  std::optional<double> seconds;         // only when timing is enabled
  std::size_t zero_mean_posets = 0;      // excluded from the average
  std::size_t verified_posets = 0;
  std::size_t verify_failures = 0;
};

/// Rows sorted by (kind, n, B, importance); byte-identical output for a
/// fixed config regardless of the thread count.
std::vector<SweepResultRow> run_sweep(const SweepConfig& cfg);

/// Seed of poset `index` at size n.
std::uint64_t poset_seed(std::uint64_t base, int n, std::size_t index);

inline constexpr std::string_view kSweepCsvHeader =
    "kind,n,B,importance,posets,estimates_per_poset,mean_rel_var,stderr,guard_frac,seconds";

void write_sweep_csv(std::ostream& os, std::span<const SweepResultRow> rows);

/// Gnuplot data: one block per importance function (separated by two blank
/// lines), with log10 columns for log-log and semi-log plots.
void write_sweep_dat(std::ostream& os, std::span<const SweepResultRow> rows);

struct PointRanking {
  int n = 0;
  std::size_t budget = 0;
  std::vector<std::pair<ImportanceKind, double>> ranking;  // ascending mean relative variance
};

struct ImportanceComparison {
  std::vector<PointRanking> points;
  double f2_beats_uniform = 0.0;  // fraction of points where f2 is strictly below uniform
  double f3_beats_uniform = 0.0;
  std::size_t comparable_points = 0;  // points with uniform, f2 and f3 all present
};

ImportanceComparison compare_importance(std::span<const SweepResultRow> rows);

void write_comparison(std::ostream& os, const ImportanceComparison& c);

}  // namespace secount
