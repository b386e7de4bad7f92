#pragma once

// Minimal CSV reader and static SVG charts for the `plot` subcommand.

#include <string>
#include <vector>

namespace dimerlab::plot {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;
  std::vector<double> numbers(int col) const;
};

Table read_csv(const std::string& text);

struct Series {
  std::string label;
  std::vector<double> x, y;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool markers = false;
};

std::string line_svg(const Chart& c);
/// Bars of equal width over [min, max] of the values.
std::string histogram_svg(const std::string& title, const std::string& label, const std::vector<double>& values,
                          int bins);

/// y against x, one series per distinct value of `group` (or a single series).
Chart lines_from(const Table& t, const std::string& x, const std::string& y, const std::string& group);
/// Mean of y for each distinct x, ascending.
Chart mean_by(const Table& t, const std::string& x, const std::string& y);
/// Sample variance of y for each distinct x, ascending.
Chart variance_by(const Table& t, const std::string& x, const std::string& y);

}  // namespace dimerlab::plot
