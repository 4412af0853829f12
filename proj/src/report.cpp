#include "elect/report.hpp"

#include <sstream>

namespace elect {

namespace fs = std::filesystem;

namespace {

std::string quote(const std::string& s) { return "\"" + s + "\""; }

// Splits one CSV line; fields may be wrapped in double quotes (no escapes).
std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      out.push_back(std::move(cell));
      cell.clear();
    } else if (ch != '\r') {
      cell += ch;
    }
  }
  out.push_back(std::move(cell));
  return out;
}

double number(const std::string& s, const std::string& file, std::size_t row, std::size_t col) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError(file, row, col, "non-numeric cell '" + s + "'");
}

MethodResult* find_method(std::vector<MethodResult>& results, const std::string& name) {
  for (auto& r : results)
    if (r.method == name) return &r;
  return nullptr;
}

}  // namespace

std::string results_csv(const std::vector<MethodResult>& results) {
  std::string out = "method,dataset_id,selected,ap,ap_rank,models_fitted\n";
  for (const auto& mr : results)
    for (const auto& r : mr.rows)
      out += mr.method + "," + r.dataset_id + "," + quote(r.selected) + "," + format_double(r.ap) + "," +
             format_double(r.ap_rank) + "," + std::to_string(r.models_fitted) + "\n";
  return out;
}

std::string summary_csv(const std::vector<MethodResult>& results) {
  std::string out = "method,datasets,mean_ap_rank,mean_ap,mean_models_fitted\n";
  for (const auto& mr : results)
    out += mr.method + "," + std::to_string(mr.rows.size()) + "," + format_double(mr.mean_ap_rank()) +
           "," + format_double(mr.mean_ap()) + "," + format_double(mr.mean_models_fitted()) + "\n";
  return out;
}

std::string pairs_csv(const std::vector<MethodResult>& results) {
  std::string out = "method_a,method_b,n,statistic,p_value,direction,verdict\n";
  for (std::size_t a = 0; a < results.size(); ++a)
    for (std::size_t b = a + 1; b < results.size(); ++b) {
      const auto c = compare_methods(results[a], results[b]);
      out += c.method_a + "," + c.method_b + "," + std::to_string(c.n) + "," + format_double(c.statistic) +
             "," + format_double(c.p_value) + "," + std::to_string(c.direction) + "," + quote(c.verdict) +
             "\n";
    }
  return out;
}

std::string timing_csv(const std::vector<MethodResult>& results) {
  std::string out = "method,dataset_id,seconds\n";
  for (const auto& mr : results)
    for (const auto& r : mr.rows) out += mr.method + "," + r.dataset_id + "," + format_double(r.seconds) + "\n";
  return out;
}

void emit_report(const LoocvOutput& output, const fs::path& dir) {
  fs::create_directories(dir);
  write_file(dir / "results.csv", results_csv(output.results));
  write_file(dir / "summary.csv", summary_csv(output.results));
  write_file(dir / "pairs.csv", pairs_csv(output.results));
  write_file(dir / "timing.csv", timing_csv(output.results));
  for (const auto& [method, traces] : output.traces) {
    const auto base = method == "elect" ? dir / "traces" : dir / "traces" / method;
    for (const auto& [id, trace] : traces) write_file(base / (id + ".json"), trace_to_json(trace));
  }
}

std::vector<MethodResult> read_results(const fs::path& dir) {
  const auto file = dir / "results.csv";
  std::istringstream in(read_file(file));
  std::string line;
  std::vector<MethodResult> results;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (row == 1 || line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != 6) throw ParseError(file.string(), row, 0, "expected 6 cells");
    auto* mr = find_method(results, cells[0]);
    if (!mr) {
      results.push_back(MethodResult{cells[0], {}});
      mr = &results.back();
    }
    DatasetResult r;
    r.dataset_id = cells[1];
    r.selected = cells[2];
    r.ap = number(cells[3], file.string(), row, 4);
    r.ap_rank = number(cells[4], file.string(), row, 5);
    r.models_fitted = static_cast<std::size_t>(number(cells[5], file.string(), row, 6));
    mr->rows.push_back(std::move(r));
  }
  if (results.empty()) throw ParseError(file.string(), 0, 0, "no result rows");

  const auto timing = dir / "timing.csv";
  if (fs::exists(timing)) {
    std::istringstream tin(read_file(timing));
    row = 0;
    while (std::getline(tin, line)) {
      ++row;
      if (row == 1 || line.empty()) continue;
      const auto cells = split_line(line);
      if (cells.size() != 3) throw ParseError(timing.string(), row, 0, "expected 3 cells");
      if (auto* mr = find_method(results, cells[0]))
        for (auto& r : mr->rows)
          if (r.dataset_id == cells[1]) r.seconds = number(cells[2], timing.string(), row, 3);
    }
  }
  return results;
}

void rerender_report(const fs::path& dir) {
  const auto results = read_results(dir);
  write_file(dir / "summary.csv", summary_csv(results));
  write_file(dir / "pairs.csv", pairs_csv(results));
}

}  // namespace elect
