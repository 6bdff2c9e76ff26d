#include "rsmm/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "rsmm/csv.hpp"

namespace rsmm {

void ReportTable::add_row(std::vector<double> row, std::string label) {
  if (row.size() != columns.size())
    throw std::invalid_argument("ReportTable '" + name + "': row width " + std::to_string(row.size()) +
                                " does not match " + std::to_string(columns.size()) + " columns");
  rows.push_back(std::move(row));
  if (!label_column.empty()) labels.push_back(std::move(label));
}

std::vector<double> ReportTable::column(const std::string& col) const {
  auto it = std::find(columns.begin(), columns.end(), col);
  if (it == columns.end()) throw std::out_of_range("ReportTable '" + name + "': no column '" + col + "'");
  auto k = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r[k]);
  return out;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::domain_error("fit_loglog_slope: need matching inputs with at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::domain_error("fit_loglog_slope: entries must be > 0");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  if (sxx == 0.0) throw std::domain_error("fit_loglog_slope: x values are all equal");
  return sxy / sxx;
}

SlopeFit fit_slope(const ReportTable& t, const std::string& xc, const std::string& yc, std::string name,
                   std::size_t first_row) {
  SlopeFit s;
  s.name = std::move(name);
  s.table = t.name;
  s.x_column = xc;
  s.y_column = yc;
  auto x = t.column(xc), y = t.column(yc);
  s.x.assign(x.begin() + static_cast<std::ptrdiff_t>(first_row), x.end());
  s.y.assign(y.begin() + static_cast<std::ptrdiff_t>(first_row), y.end());
  s.value = fit_loglog_slope(s.x, s.y);
  s.loo_min = s.loo_max = s.value;
  if (s.x.size() >= 3) {
    s.loo_min = INFINITY;
    s.loo_max = -INFINITY;
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      std::vector<double> xs, ys;
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (i != k) {
          xs.push_back(s.x[i]);
          ys.push_back(s.y[i]);
        }
      double v = fit_loglog_slope(xs, ys);
      s.loo_min = std::min(s.loo_min, v);
      s.loo_max = std::max(s.loo_max, v);
    }
  }
  return s;
}

Check evaluate_check(std::string name, double value, const CheckSpec& spec) {
  Check c{std::move(name), value, spec, false};
  const auto& k = spec.kind;
  if (!std::isfinite(value))
    c.pass = false;
  else if (k == "rel")
    c.pass = std::abs(value - spec.target) <= spec.tolerance * std::abs(spec.target);
  else if (k == "abs")
    c.pass = std::abs(value - spec.target) <= spec.tolerance;
  else if (k == "max")
    c.pass = value <= spec.tolerance;
  else if (k == "min")
    c.pass = value >= spec.tolerance;
  else if (k == "range")
    c.pass = value >= spec.target && value <= spec.tolerance;
  else if (k == "bool")
    c.pass = value != 0.0;
  else
    throw std::invalid_argument("check '" + c.name + "': unknown kind '" + k + "'");
  return c;
}

bool ExperimentReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const ReportTable& ExperimentReport::table(const std::string& n) const {
  for (const auto& t : tables)
    if (t.name == n) return t;
  throw std::out_of_range("report has no table '" + n + "'");
}

const SlopeFit& ExperimentReport::slope(const std::string& n) const {
  for (const auto& s : slopes)
    if (s.name == n) return s;
  throw std::out_of_range("report has no slope '" + n + "'");
}

const Check& ExperimentReport::check(const std::string& n) const {
  for (const auto& c : checks)
    if (c.name == n) return c;
  throw std::out_of_range("report has no check '" + n + "'");
}

nlohmann::json report_json(const ExperimentReport& r) {
  using nlohmann::json;
  json j;
  j["experiment"] = r.experiment;
  j["params"] = r.params;
  j["tables"] = json::array();
  for (const auto& t : r.tables) {
    json jt{{"name", t.name},
            {"caption", t.caption},
            {"file", r.experiment + "_" + t.name + ".csv"},
            {"columns", t.columns},
            {"data", t.rows}};
    if (!t.label_column.empty()) {
      jt["label_column"] = t.label_column;
      jt["labels"] = t.labels;
    }
    j["tables"].push_back(jt);
  }
  j["slopes"] = json::object();
  for (const auto& s : r.slopes)
    j["slopes"][s.name] = json{{"value", s.value},     {"table", s.table},     {"x_column", s.x_column},
                               {"y_column", s.y_column}, {"x", s.x},           {"y", s.y},
                               {"loo_min", s.loo_min}, {"loo_max", s.loo_max}};
  j["checks"] = json::array();
  for (const auto& c : r.checks)
    j["checks"].push_back(json{{"name", c.name},
                               {"value", c.value},
                               {"kind", c.spec.kind},
                               {"target", c.spec.target},
                               {"tolerance", c.spec.tolerance},
                               {"pass", c.pass}});
  j["all_pass"] = r.all_pass();
  j["notes"] = r.notes;
  j["runtime_seconds"] = r.runtime_seconds;
  return j;
}

void write_table_csv(std::ostream& os, const ReportTable& t) {
  std::vector<std::string> header;
  if (!t.label_column.empty()) header.push_back(t.label_column);
  header.insert(header.end(), t.columns.begin(), t.columns.end());
  CsvWriter w(os, header);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    std::vector<std::string> cells;
    if (!t.label_column.empty()) cells.push_back(t.labels[i]);
    for (double v : t.rows[i]) cells.push_back(format_double(v));
    w.row(cells);
  }
}

std::vector<std::filesystem::path> emit_report(const ExperimentReport& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("emit_report: cannot create '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> files;
  for (const auto& t : r.tables) {
    auto path = dir / (r.experiment + "_" + t.name + ".csv");
    std::ofstream f(path);
    if (!f) throw std::runtime_error("emit_report: cannot write '" + path.string() + "'");
    write_table_csv(f, t);
    files.push_back(path);
  }
  auto path = dir / (r.experiment + ".json");
  std::ofstream f(path);
  if (!f) throw std::runtime_error("emit_report: cannot write '" + path.string() + "'");
  f << report_json(r).dump(2) << '\n';
  if (!f) throw std::runtime_error("emit_report: write failed for '" + path.string() + "'");
  files.push_back(path);
  return files;
}

}  // namespace rsmm
