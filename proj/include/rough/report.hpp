#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rough {

// Tabular artifact. CSV is the source of truth for every experiment; JSON
// and SVG are derived views.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns);

  void add_row(const std::vector<double>& values);
  void add_row(const std::vector<std::string>& values);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t row_count() const { return rows_.size(); }
  const std::vector<std::string>& row(std::size_t i) const { return rows_[i]; }

  std::string to_string() const;
  void write(const std::string& path) const;  // throws std::runtime_error

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

std::string format_double(double v);

// One line-plot series with an optional confidence ribbon.
struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> lo;  // empty: no ribbon
  std::vector<double> hi;
};

// Minimal hand-rolled SVG line plot: log-scale abscissa option, CI ribbons,
// axis ticks. No external plotting dependency.
struct SvgPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  int width = 640;
  int height = 420;
  std::vector<PlotSeries> series;

  std::string to_svg() const;
  void write(const std::string& path) const;
};

// Reproducibility record: enough to rerun the experiment bit for bit in
// single-worker mode.
struct RunManifest {
  std::string subcommand;
  std::string config_echo;  // flattened key=value pairs
  std::uint64_t seed = 0;
  int workers = 1;
  std::string version;  // code version string

  std::string to_json() const;
  void write(const std::string& path) const;
};

std::string code_version();

void write_text_file(const std::string& path, const std::string& content);

}  // namespace rough
