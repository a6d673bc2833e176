#include "secount/analysis.hpp"

#include <ostream>

#include "secount/csv.hpp"

namespace secount {

void write_analysis_csv(std::ostream& os, std::span<const AnalysisRow> rows) {
  os << "instance,B,importance,variance,cv2,alpha_var,alpha_max,level_max_product\n";
  for (const auto& r : rows) {
    os << csv_field(r.instance) << ',' << r.budget << ',' << csv_field(r.importance) << ','
       << format_double(r.variance) << ',' << format_double(r.cv2) << ',' << format_double(r.alpha_variance) << ','
       << format_double(r.alpha_max) << ',' << format_double(r.level_max_product) << '\n';
  }
}

}  // namespace secount
