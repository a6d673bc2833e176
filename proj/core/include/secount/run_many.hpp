#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "secount/choice.hpp"
#include "secount/errors.hpp"
#include "secount/parallel.hpp"
#include "secount/rng.hpp"

namespace secount {

/// Summary statistics of R independent estimates.
struct RunSummary {
  std::size_t runs = 0;
  double mean = 0.0;
  double variance = 0.0;           // unbiased sample variance; 0 when R = 1
  double relative_variance = 0.0;  // variance / mean^2 (= CV^2)
  double standard_error = 0.0;     // sqrt(variance / R)
  bool variance_defined = false;   // R >= 2
  bool relative_defined = false;   // R >= 2 and mean != 0

  double cv2() const { return relative_variance; }
};

/// Pairwise (cascade) summation, deterministic for a fixed input order.
double pairwise_sum(std::span<const double> xs);

RunSummary summarize(std::span<const double> estimates);

struct RunConfig {
  std::size_t runs = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;            // 0 = hardware concurrency
  std::uint64_t stream = 0;        // distinguishes independent experiments sharing a seed
};

/// Choice source for run `index` of stream `stream`.
inline ChoiceSource run_choices(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return ChoiceSource::random(Rng(seed, {stream, index}));
}

/// Runs one_run(ChoiceSource&) -> double for R runs, each on its own
/// substream (seed, stream, i). The estimates, in run order, go to
/// `estimates_out` when given. Results do not depend on the thread count.
template <class F>
RunSummary run_many(const F& one_run, const RunConfig& cfg, std::vector<double>* estimates_out = nullptr) {
  if (cfg.runs == 0) throw std::invalid_argument("run count must be at least 1");
  std::vector<double> estimates(cfg.runs);
  try {
    parallel_for(cfg.runs, cfg.threads, [&](std::size_t i) {
      try {
        ChoiceSource c = run_choices(cfg.seed, cfg.stream, i);
        estimates[i] = static_cast<double>(one_run(c));
      } catch (const std::exception& e) {
        throw EstimatorError("run " + std::to_string(i) + " (seed " + std::to_string(cfg.seed) + "): " + e.what());
      }
    });
  } catch (const EstimatorError&) {
    throw;
  }
  RunSummary s = summarize(estimates);
  if (estimates_out != nullptr) *estimates_out = std::move(estimates);
  return s;
}

}  // namespace secount
