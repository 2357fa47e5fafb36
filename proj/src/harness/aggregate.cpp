#include "seqbench/harness/aggregate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "seqbench/core/error.hpp"
#include "seqbench/solvers/solver.hpp"

namespace seqbench::harness {

namespace fs = std::filesystem;

namespace {

std::size_t index_of(std::vector<std::string>& list, const std::string& name) {
  const auto it = std::find(list.begin(), list.end(), name);
  if (it != list.end()) return static_cast<std::size_t>(it - list.begin());
  list.push_back(name);
  return list.size() - 1;
}

TableCell summarize(const std::vector<double>& values) {
  TableCell cell;
  cell.n = values.size();
  double sum = 0.0;
  for (const double v : values) sum += v;
  cell.mean = sum / static_cast<double>(cell.n);
  if (cell.n > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - cell.mean) * (v - cell.mean);
    cell.std = std::sqrt(ss / static_cast<double>(cell.n - 1));
  }
  return cell;
}

void normalize(ResultsTable& table) {
  const std::size_t S = table.solvers.size();
  const std::size_t T = table.tasks.size();
  table.normalized.assign(S, std::vector<std::optional<double>>(T));
  table.normalized_sum.assign(S, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t s = 0; s < S; ++s) {
      if (!table.cells[s][t]) continue;
      lo = std::min(lo, table.cells[s][t]->mean);
      hi = std::max(hi, table.cells[s][t]->mean);
    }
    for (std::size_t s = 0; s < S; ++s) {
      if (!table.cells[s][t]) continue;
      const double v = hi > lo ? (table.cells[s][t]->mean - lo) / (hi - lo) : 0.0;
      table.normalized[s][t] = v;
      table.normalized_sum[s] += v;
    }
  }
}

/// Shortest text that parses back to the same double.
std::string exact(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw Error(ErrorCode::ConfigError, "unterminated quote in CSV line");
  fields.push_back(cur);
  return fields;
}

double parse_number(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::ConfigError, "not a number in CSV: '" + s + "'");
  }
  return v;
}

}  // namespace

ResultsTable aggregate(const std::vector<observer::RunSummary>& records) {
  ResultsTable table;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<double>> groups;
  for (const auto& r : records) {
    const std::size_t s = index_of(table.solvers, solvers::display_name(r.solver));
    const std::size_t t = index_of(table.tasks, r.task);
    if (r.status == "ok") groups[{s, t}].push_back(r.best_score);
  }
  table.cells.assign(table.solvers.size(), std::vector<std::optional<TableCell>>(table.tasks.size()));
  for (std::size_t s = 0; s < table.solvers.size(); ++s) {
    for (std::size_t t = 0; t < table.tasks.size(); ++t) {
      const auto it = groups.find({s, t});
      if (it == groups.end()) {
        table.missing.emplace_back(table.solvers[s], table.tasks[t]);
        continue;
      }
      // Sorted so the floating-point sums do not depend on record order.
      std::vector<double> values = it->second;
      std::sort(values.begin(), values.end());
      table.cells[s][t] = summarize(values);
    }
  }
  normalize(table);
  return table;
}

std::string format_cell(const TableCell& cell) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f \xC2\xB1 %.2f", cell.mean, cell.std);
  return buf;
}

std::string emit_table(const ResultsTable& table, TableFormat format) {
  std::ostringstream out;
  if (format == TableFormat::Markdown) {
    out << "| Solver |";
    for (const auto& t : table.tasks) out << ' ' << t << " |";
    out << ' ' << kSumColumn << " |\n|---|";
    for (std::size_t t = 0; t < table.tasks.size(); ++t) out << "---|";
    out << "---|\n";
    for (std::size_t s = 0; s < table.solvers.size(); ++s) {
      out << "| " << table.solvers[s] << " |";
      for (std::size_t t = 0; t < table.tasks.size(); ++t) {
        out << ' ' << (table.cells[s][t] ? format_cell(*table.cells[s][t]) : std::string()) << " |";
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", table.normalized_sum[s]);
      out << ' ' << buf << " |\n";
    }
    return out.str();
  }

  out << "solver";
  for (const auto& t : table.tasks) {
    out << ',' << csv_field(t + " mean") << ',' << csv_field(t + " std") << ',' << csv_field(t + " n");
  }
  out << ',' << csv_field(kSumColumn) << '\n';
  for (std::size_t s = 0; s < table.solvers.size(); ++s) {
    out << csv_field(table.solvers[s]);
    for (std::size_t t = 0; t < table.tasks.size(); ++t) {
      if (const auto& c = table.cells[s][t]) {
        out << ',' << exact(c->mean) << ',' << exact(c->std) << ',' << c->n;
      } else {
        out << ",,,";
      }
    }
    out << ',' << exact(table.normalized_sum[s]) << '\n';
  }
  return out.str();
}

ResultsTable parse_csv_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ConfigError, "empty CSV");
  const auto header = split_csv_line(line);
  if (header.size() < 2 || (header.size() - 2) % 3 != 0 || header.front() != "solver" ||
      header.back() != kSumColumn) {
    throw Error(ErrorCode::ConfigError, "unexpected CSV header");
  }
  ResultsTable table;
  const std::size_t T = (header.size() - 2) / 3;
  for (std::size_t t = 0; t < T; ++t) {
    const std::string& name = header[1 + 3 * t];
    if (name.size() < 5 || name.substr(name.size() - 5) != " mean") {
      throw Error(ErrorCode::ConfigError, "unexpected CSV column '" + name + "'");
    }
    table.tasks.push_back(name.substr(0, name.size() - 5));
  }
  std::vector<double> sums;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size()) throw Error(ErrorCode::ConfigError, "CSV row has the wrong width");
    table.solvers.push_back(f[0]);
    std::vector<std::optional<TableCell>> row(T);
    for (std::size_t t = 0; t < T; ++t) {
      if (f[1 + 3 * t].empty()) continue;
      TableCell c;
      c.mean = parse_number(f[1 + 3 * t]);
      c.std = parse_number(f[2 + 3 * t]);
      c.n = static_cast<std::size_t>(parse_number(f[3 + 3 * t]));
      row[t] = c;
    }
    table.cells.push_back(std::move(row));
    sums.push_back(parse_number(f.back()));
  }
  for (std::size_t s = 0; s < table.solvers.size(); ++s) {
    for (std::size_t t = 0; t < T; ++t) {
      if (!table.cells[s][t]) table.missing.emplace_back(table.solvers[s], table.tasks[t]);
    }
  }
  normalize(table);
  table.normalized_sum = std::move(sums);
  return table;
}

std::vector<observer::RunSummary> collect_summaries(const std::vector<fs::path>& dirs) {
  std::vector<fs::path> files;
  for (const auto& dir : dirs) {
    if (!fs::exists(dir)) throw Error(ErrorCode::IoError, "no such directory " + dir.string());
    if (fs::is_regular_file(dir) && dir.filename() == observer::kSummaryFile) {
      files.push_back(dir);
      continue;
    }
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().filename() == observer::kSummaryFile) {
        files.push_back(entry.path());
      }
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<observer::RunSummary> out;
  for (const auto& f : files) out.push_back(observer::read_summary(f.parent_path()));
  return out;
}

}  // namespace seqbench::harness
