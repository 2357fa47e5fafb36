#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqbench/observer/observer.hpp"

namespace seqbench::harness {

inline constexpr const char* kSumColumn = "Sum (normalized per row)";

struct TableCell {
  std::size_t n = 0;
  double mean = 0.0;
  /// Sample standard deviation; 0 for a single run.
  double std = 0.0;
};

/// Rows are solvers (display names), columns tasks, both in first-seen order.
struct ResultsTable {
  std::vector<std::string> solvers;
  std::vector<std::string> tasks;
  /// cells[s][t]; empty for a missing (solver, task) group.
  std::vector<std::vector<std::optional<TableCell>>> cells;
  /// Per task min-max normalization of the cell means across solvers.
  std::vector<std::vector<std::optional<double>>> normalized;
  std::vector<double> normalized_sum;
  /// (solver, task) pairs with no successful run.
  std::vector<std::pair<std::string, std::string>> missing;
};

/// Groups successful summaries by (solver, task). Failed runs are skipped.
ResultsTable aggregate(const std::vector<observer::RunSummary>& records);

enum class TableFormat { Csv, Markdown };

/// Markdown cells read "0.968 ± 0.03"; CSV keeps full precision.
std::string emit_table(const ResultsTable& table, TableFormat format);

/// Reads back emit_table(..., Csv). Throws ConfigError on malformed input.
ResultsTable parse_csv_table(const std::string& text);

/// "1.000 ± 0.00"
std::string format_cell(const TableCell& cell);

/// Every summary.json below the given directories, in path order.
std::vector<observer::RunSummary> collect_summaries(const std::vector<std::filesystem::path>& dirs);

}  // namespace seqbench::harness
