#include "runner/report.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <vector>

#include "common.hpp"
#include "evaluation/metrics.hpp"
#include "util/text.hpp"

namespace fs = std::filesystem;

namespace bspinn::run {

namespace {

struct SummaryRow {
  std::string dir;
  std::vector<double> errors;
  int failed = 0;
};

SummaryRow read_summary(const fs::path& csv) {
  SummaryRow row;
  row.dir = csv.parent_path().string();
  std::istringstream in(util::read_file(csv.string()));
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    const auto trimmed = util::trim(line);
    if (trimmed.empty()) continue;
    const auto parts = util::split(trimmed, ',');
    if (parts.size() < 5) continue;
    if (util::trim(parts[4]) == "1") {
      ++row.failed;
      continue;
    }
    row.errors.push_back(util::parse_double(parts[1]));
  }
  return row;
}

}  // namespace

std::string build_report(const std::string& root) {
  if (!fs::exists(root)) throw IoError("no such directory: " + root);
  std::vector<fs::path> summaries;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (entry.is_regular_file() && entry.path().filename() == "summary.csv") {
      summaries.push_back(entry.path());
    }
  }
  std::sort(summaries.begin(), summaries.end());

  std::ostringstream out;
  out << "run directory, seeds, failed, mean_error, std_error, best_error\n";
  for (const auto& path : summaries) {
    const SummaryRow row = read_summary(path);
    out << row.dir << ", " << row.errors.size() << ", " << row.failed << ", ";
    if (row.errors.empty()) {
      out << "-, -, -\n";
      continue;
    }
    const auto report = eval::ErrorReport::compute(row.errors);
    out << util::format_double(report.mean) << ", "
        << util::format_double(report.stddev) << ", "
        << util::format_double(report.per_seed[report.best_index]) << "\n";
  }
  return out.str();
}

}  // namespace bspinn::run
