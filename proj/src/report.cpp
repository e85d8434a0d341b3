#include "rough/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rough {

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns)
    : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("csv: no columns");
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> row(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    row[i] = format_double(values[i]);
  add_row(row);
}

void CsvTable::add_row(const std::vector<std::string>& values) {
  if (values.size() != columns_.size())
    throw std::invalid_argument("csv: row width does not match header");
  rows_.push_back(values);
}

std::string CsvTable::to_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < columns_.size(); ++i)
    out << (i ? "," : "") << csv_escape(columns_[i]);
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << csv_escape(row[i]);
    out << '\n';
  }
  return out.str();
}

void CsvTable::write(const std::string& path) const {
  write_text_file(path, to_string());
}

std::string SvgPlot::to_svg() const {
  const double ml = 64, mr = 16, mt = 32, mb = 48;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double xv = log_x ? std::log10(s.x[i]) : s.x[i];
      xmin = std::min(xmin, xv);
      xmax = std::max(xmax, xv);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
      if (s.lo.size() == s.x.size()) {
        ymin = std::min(ymin, s.lo[i]);
        ymax = std::max(ymax, s.hi[i]);
      }
    }
  }
  if (xmin > xmax) { xmin = 0; xmax = 1; }
  if (ymin > ymax) { ymin = 0; ymax = 1; }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + (std::abs(ymin) > 0 ? std::abs(ymin) : 1.0);
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) {
    const double xv = log_x ? std::log10(x) : x;
    return ml + pw * (xv - xmin) / (xmax - xmin);
  };
  auto py = [&](double y) { return mt + ph * (ymax - y) / (ymax - ymin); };

  static const char* palette[] = {"#2266aa", "#aa4422", "#228855", "#775599"};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";

  // axes and ticks
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#444\"/>\n";
  const int nticks = 5;
  for (int i = 0; i <= nticks; ++i) {
    const double fx = xmin + (xmax - xmin) * i / nticks;
    const double gx = ml + pw * static_cast<double>(i) / nticks;
    out << "<line x1=\"" << gx << "\" y1=\"" << mt + ph << "\" x2=\"" << gx
        << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << gx << "\" y=\"" << mt + ph + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"10\">"
        << format_double(log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
    const double fy = ymin + (ymax - ymin) * i / nticks;
    const double gy = py(fy);
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << gy << "\" x2=\"" << ml
        << "\" y2=\"" << gy << "\" stroke=\"#444\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << gy + 3
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"10\">"
        << format_double(fy) << "</text>\n";
  }
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 8
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"12\">"
      << x_label << "</text>\n";
  out << "<text x=\"14\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\""
      << " transform=\"rotate(-90 14 " << mt + ph / 2 << ")\">" << y_label
      << "</text>\n";

  int ci = 0;
  for (const auto& s : series) {
    const char* color = palette[ci % 4];
    if (s.lo.size() == s.x.size() && !s.x.empty()) {
      out << "<path d=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i)
        out << (i ? "L" : "M") << px(s.x[i]) << " " << py(s.lo[i]);
      for (std::size_t i = s.x.size(); i-- > 0;)
        out << "L" << px(s.x[i]) << " " << py(s.hi[i]);
      out << "Z\" fill=\"" << color << "\" fill-opacity=\"0.15\" "
          << "stroke=\"none\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out << px(s.x[i]) << "," << py(s.y[i]) << " ";
    out << "\"/>\n";
    out << "<text x=\"" << ml + pw - 6 << "\" y=\"" << mt + 14 + 14 * ci
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\""
        << " fill=\"" << color << "\">" << s.name << "</text>\n";
    ++ci;
  }
  out << "</svg>\n";
  return out.str();
}

void SvgPlot::write(const std::string& path) const {
  write_text_file(path, to_svg());
}

std::string code_version() { return "roughheat 0.1.0"; }

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["config"] = config_echo;
  j["seed"] = seed;
  j["workers"] = workers;
  j["version"] = version.empty() ? code_version() : version;
  return j.dump(2) + "\n";
}

void RunManifest::write(const std::string& path) const {
  write_text_file(path, to_json());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace rough
