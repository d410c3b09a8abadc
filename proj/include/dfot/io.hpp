#pragma once

#include <string>
#include <vector>

#include "dfot/dfdist.hpp"

namespace dfot {

// File and text round-trips. Parse failures throw InvalidInput.

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

// {"extreme_points": [[...], ...]}
FeasibleRegion parse_region(const std::string& json_text);
std::string region_to_json(const FeasibleRegion& region);
FeasibleRegion load_region(const std::string& path);

// {"points": [[...], ...], "weights": [...]}; weights optional (uniform).
DiscreteMeasure parse_measure(const std::string& json_text);
std::string measure_to_json(const DiscreteMeasure& m);
DiscreteMeasure load_measure(const std::string& path);

// {"value", "method", "coupling": {"rows","cols","entries":[[i,j,mass]]},
//  "dual": {"f": [...], "g": [...]}, ...}; "coupling" is omitted when empty.
std::string df_result_to_json(const DFResult& result);
DFResult parse_df_result(const std::string& json_text);

// Plan triplet CSV "i,j,mass". Marginals are recomputed from the entries,
// so a plan is checked against measures by comparing them.
Coupling parse_plan_csv(const std::string& csv_text, std::size_t rows, std::size_t cols);

// Minimal CSV table with a header row of column names.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  std::string to_csv() const;
};

Table parse_table_csv(const std::string& csv_text);

// Shortest round-tripping decimal form.
std::string format_double(double v);
// Fixed number of decimals.
std::string format_fixed(double v, int decimals);

}  // namespace dfot
