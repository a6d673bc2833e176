#include "secount/run_many.hpp"

namespace secount {

double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

RunSummary summarize(std::span<const double> estimates) {
  if (estimates.empty()) throw std::invalid_argument("cannot summarize zero estimates");
  RunSummary s;
  s.runs = estimates.size();
  s.mean = pairwise_sum(estimates) / static_cast<double>(s.runs);
  if (s.runs >= 2) {
    std::vector<double> sq(estimates.size());
    for (std::size_t i = 0; i < estimates.size(); ++i) {
      const double d = estimates[i] - s.mean;
      sq[i] = d * d;
    }
    s.variance = pairwise_sum(sq) / static_cast<double>(s.runs - 1);
    s.variance_defined = true;
    s.standard_error = std::sqrt(s.variance / static_cast<double>(s.runs));
    if (s.mean != 0.0) {
      s.relative_variance = s.variance / (s.mean * s.mean);
      s.relative_defined = true;
    }
  }
  return s;
}

}  // namespace secount
