#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace rsmm {

struct ReportTable {
  ReportTable() = default;
  ReportTable(std::string name_, std::string caption_, std::vector<std::string> columns_)
      : name(std::move(name_)), caption(std::move(caption_)), columns(std::move(columns_)) {}

  std::string name;
  std::string caption;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  // optional leading text column (e.g. strategy names)
  std::string label_column;
  std::vector<std::string> labels;

  void add_row(std::vector<double> row, std::string label = {});
  std::vector<double> column(const std::string& name) const;
};

// ordinary least-squares slope of log y on log x; throws std::domain_error on
// nonpositive entries or fewer than two points
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct SlopeFit {
  std::string name;
  std::string table;
  std::string x_column, y_column;
  std::vector<double> x, y;
  double value = 0.0;
  // leave-one-out range (equal to value when fewer than three points)
  double loo_min = 0.0, loo_max = 0.0;
};

SlopeFit fit_slope(const ReportTable& t, const std::string& x_column, const std::string& y_column,
                   std::string name, std::size_t first_row = 0);

// kind: "rel"  |value - target| <= tolerance * |target|
//       "abs"  |value - target| <= tolerance
//       "max"  value <= tolerance
//       "min"  value >= tolerance
//       "range" target <= value <= tolerance
//       "bool" value != 0
struct CheckSpec {
  std::string kind = "abs";
  double target = 0.0;
  double tolerance = 0.0;
};

struct Check {
  std::string name;
  double value = 0.0;
  CheckSpec spec;
  bool pass = false;
};

Check evaluate_check(std::string name, double value, const CheckSpec& spec);

struct ExperimentReport {
  std::string experiment;
  nlohmann::json params;
  std::vector<ReportTable> tables;
  std::vector<SlopeFit> slopes;
  std::vector<Check> checks;
  nlohmann::json notes = nlohmann::json::object();
  double runtime_seconds = 0.0;

  bool all_pass() const;
  const ReportTable& table(const std::string& name) const;
  const SlopeFit& slope(const std::string& name) const;
  const Check& check(const std::string& name) const;
};

nlohmann::json report_json(const ExperimentReport& r);
void write_table_csv(std::ostream& os, const ReportTable& t);
// writes <dir>/<experiment>_<table>.csv and <dir>/<experiment>.json; returns the files written
std::vector<std::filesystem::path> emit_report(const ExperimentReport& r, const std::filesystem::path& dir);

}  // namespace rsmm
