#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "dimerlab/io.hpp"
#include "dimerlab/stats.hpp"

namespace dimerlab::plot {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') {
      out += "&lt;";
    } else if (c == '>') {
      out += "&gt;";
    } else if (c == '&') {
      out += "&amp;";
    } else {
      out += c;
    }
  }
  return out;
}

constexpr double kW = 640, kH = 420, kL = 70, kR = 20, kT = 40, kB = 50;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kL + (x - x0) / (x1 - x0) * (kW - kL - kR); }
  double py(double y) const { return kH - kB - (y - y0) / (y1 - y0) * (kH - kT - kB); }
};

Frame frame_for(std::vector<double> xs, std::vector<double> ys) {
  auto span = [](const std::vector<double>& v, double& lo, double& hi) {
    lo = INFINITY;
    hi = -INFINITY;
    for (double a : v) {
      if (!std::isfinite(a)) continue;
      lo = std::min(lo, a);
      hi = std::max(hi, a);
    }
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (hi - lo < 1e-300) lo -= 0.5, hi += 0.5;
  };
  Frame f{};
  span(xs, f.x0, f.x1);
  span(ys, f.y0, f.y1);
  const double pad = 0.05 * (f.y1 - f.y0);
  f.y0 -= pad;
  f.y1 += pad;
  return f;
}

void axes(std::ostringstream& os, const Frame& f, const std::string& title, const std::string& xl,
          const std::string& yl) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(title)
     << "</text>\n";
  os << "<line x1=\"" << kL << "\" y1=\"" << kH - kB << "\" x2=\"" << kW - kR << "\" y2=\"" << kH - kB
     << "\" stroke=\"black\"/>\n<line x1=\"" << kL << "\" y1=\"" << kT << "\" x2=\"" << kL << "\" y2=\"" << kH - kB
     << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double x = f.x0 + (f.x1 - f.x0) * k / 4, y = f.y0 + (f.y1 - f.y0) * k / 4;
    os << "<text x=\"" << f.px(x) << "\" y=\"" << kH - kB + 16 << "\" text-anchor=\"middle\">"
       << io::format_double(std::round(x * 1e4) / 1e4) << "</text>\n";
    os << "<text x=\"" << kL - 6 << "\" y=\"" << f.py(y) + 4 << "\" text-anchor=\"end\">"
       << io::format_double(std::round(y * 1e4) / 1e4) << "</text>\n";
  }
  os << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\">" << esc(xl) << "</text>\n";
  os << "<text x=\"16\" y=\"" << kH / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << kH / 2
     << ")\">" << esc(yl) << "</text>\n";
}

Chart aggregate(const Table& t, const std::string& x, const std::string& y, bool variance) {
  const auto xs = t.numbers(t.column(x));
  const auto ys = t.numbers(t.column(y));
  std::map<double, std::vector<double>> groups;
  for (std::size_t k = 0; k < xs.size(); ++k)
    if (std::isfinite(ys[k])) groups[xs[k]].push_back(ys[k]);
  Series s{variance ? "var " + y : "mean " + y, {}, {}};
  for (const auto& [gx, v] : groups) {
    const auto sum = stats::summarize(v);
    s.x.push_back(gx);
    s.y.push_back(variance ? sum.var : sum.mean);
  }
  return {s.label + " by " + x, x, s.label, {s}, true};
}

}  // namespace

int Table::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::invalid_argument("no column '" + name + "' in CSV");
  return static_cast<int>(it - header.begin());
}

std::vector<double> Table::numbers(int col) const {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (col >= static_cast<int>(r.size())) throw std::invalid_argument("short CSV row");
    try {
      out.push_back(std::stod(r[col]));
    } catch (const std::exception&) {
      out.push_back(NAN);
    }
  }
  return out;
}

Table read_csv(const std::string& text) {
  Table t;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty CSV");
  t.header = split_row(line);
  while (std::getline(is, line))
    if (!line.empty()) t.rows.push_back(split_row(line));
  return t;
}

std::string line_svg(const Chart& c) {
  std::vector<double> xs, ys;
  for (const auto& s : c.series) {
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    ys.insert(ys.end(), s.y.begin(), s.y.end());
  }
  const auto f = frame_for(xs, ys);
  std::ostringstream os;
  axes(os, f, c.title, c.x_label, c.y_label);
  for (std::size_t k = 0; k < c.series.size(); ++k) {
    const auto& s = c.series[k];
    const char* color = kColors[k % 8];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" stroke-opacity=\""
       << (c.series.size() > 8 ? 0.35 : 1.0) << "\" points=\"";
    for (std::size_t j = 0; j < s.x.size(); ++j)
      if (std::isfinite(s.y[j])) os << f.px(s.x[j]) << ',' << f.py(s.y[j]) << ' ';
    os << "\"/>\n";
    if (c.markers) {
      for (std::size_t j = 0; j < s.x.size(); ++j)
        if (std::isfinite(s.y[j]))
          os << "<circle cx=\"" << f.px(s.x[j]) << "\" cy=\"" << f.py(s.y[j]) << "\" r=\"3\" fill=\"" << color
             << "\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

std::string histogram_svg(const std::string& title, const std::string& label, const std::vector<double>& values,
                          int bins) {
  if (bins < 1) throw std::invalid_argument("bins must be positive");
  std::vector<double> v;
  for (double a : values)
    if (std::isfinite(a)) v.push_back(a);
  if (v.empty()) throw std::invalid_argument("no finite values to plot");
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi - lo < 1e-300) lo -= 0.5, hi += 0.5;
  std::vector<double> count(bins, 0.0);
  for (double a : v) count[std::min(bins - 1, static_cast<int>((a - lo) / (hi - lo) * bins))] += 1;
  Frame f{lo, hi, 0.0, *std::max_element(count.begin(), count.end()) * 1.05};
  std::ostringstream os;
  axes(os, f, title, label, "count");
  const double w = (hi - lo) / bins;
  for (int b = 0; b < bins; ++b) {
    os << "<rect x=\"" << f.px(lo + b * w) << "\" y=\"" << f.py(count[b]) << "\" width=\""
       << f.px(lo + (b + 1) * w) - f.px(lo + b * w) << "\" height=\"" << f.py(0) - f.py(count[b])
       << "\" fill=\"#1f77b4\" stroke=\"white\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

Chart lines_from(const Table& t, const std::string& x, const std::string& y, const std::string& group) {
  const auto xs = t.numbers(t.column(x));
  const auto ys = t.numbers(t.column(y));
  Chart c{y + " against " + x, x, y, {}, false};
  if (group.empty()) {
    c.series.push_back({y, xs, ys});
    c.markers = true;
    return c;
  }
  const int gc = t.column(group);
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const auto& key = t.rows[k][gc];
    auto [it, fresh] = index.emplace(key, c.series.size());
    if (fresh) c.series.push_back({group + "=" + key, {}, {}});
    c.series[it->second].x.push_back(xs[k]);
    c.series[it->second].y.push_back(ys[k]);
  }
  return c;
}

Chart mean_by(const Table& t, const std::string& x, const std::string& y) { return aggregate(t, x, y, false); }
Chart variance_by(const Table& t, const std::string& x, const std::string& y) { return aggregate(t, x, y, true); }

}  // namespace dimerlab::plot
