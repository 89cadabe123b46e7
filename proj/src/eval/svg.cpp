#include "diffgt/eval/svg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "diffgt/error.hpp"

namespace diffgt {
namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 150;
constexpr double kTop = 40;
constexpr double kBottom = 50;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!std::isfinite(lo)) lo = hi = 0.0;
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

class Canvas {
 public:
  Canvas(Range x, Range y) : x_(x), y_(y) {}

  double px(double v) const { return kLeft + (v - x_.lo) / (x_.hi - x_.lo) * (kWidth - kLeft - kRight); }
  double py(double v) const { return kHeight - kBottom - (v - y_.lo) / (y_.hi - y_.lo) * (kHeight - kTop - kBottom); }

  void frame(std::ostringstream& out, const std::string& title, const std::string& xl, const std::string& yl) const {
    out << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
        << "</text>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight << "\" y2=\""
        << kHeight - kBottom << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kHeight - kBottom
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
      const double xv = x_.lo + (x_.hi - x_.lo) * i / 4.0;
      const double yv = y_.lo + (y_.hi - y_.lo) * i / 4.0;
      out << "<text x=\"" << px(xv) << "\" y=\"" << kHeight - kBottom + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
          << std::setprecision(3) << xv << "</text>\n";
      out << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << yv
          << "</text>\n";
    }
    out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(xl) << "</text>\n";
    out << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2 << "\" text-anchor=\"middle\" font-size=\"12\" "
        << "transform=\"rotate(-90 16 " << (kTop + kHeight - kBottom) / 2 << ")\">" << escape(yl) << "</text>\n";
  }

 private:
  Range x_;
  Range y_;
};

std::string open_svg() {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\">\n";
  return out.str();
}

void legend_entry(std::ostringstream& out, std::size_t index, const std::string& name) {
  const double y = kTop + 18.0 * static_cast<double>(index);
  out << "<rect x=\"" << kWidth - kRight + 14 << "\" y=\"" << y << "\" width=\"12\" height=\"12\" fill=\""
      << kPalette[index % 10] << "\"/>\n";
  out << "<text x=\"" << kWidth - kRight + 32 << "\" y=\"" << y + 10 << "\" font-size=\"12\">" << escape(name)
      << "</text>\n";
}

}  // namespace

std::string svg_line_chart(std::span<const Series> series, const std::string& title, const std::string& x_label,
                           const std::string& y_label) {
  Range xr;
  Range yr;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw ShapeError("svg_line_chart: series '" + s.name + "' has mismatched x/y");
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.finish();
  yr.finish();
  const Canvas canvas(xr, yr);
  std::ostringstream out;
  out << open_svg();
  canvas.frame(out, title, x_label, y_label);
  out << std::setprecision(6);
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << kPalette[i % 10] << "\" points=\"";
    for (std::size_t p = 0; p < series[i].x.size(); ++p) {
      if (!std::isfinite(series[i].y[p])) continue;
      out << canvas.px(series[i].x[p]) << ',' << canvas.py(series[i].y[p]) << ' ';
    }
    out << "\"/>\n";
    legend_entry(out, i, series[i].name);
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_scatter(const Matrix& points, std::span<const int> labels, const std::string& title) {
  if (points.cols() != 2 || labels.size() != points.rows()) throw ShapeError("svg_scatter: need n×2 points and n labels");
  Range xr;
  Range yr;
  for (std::size_t r = 0; r < points.rows(); ++r) {
    xr.add(points(r, 0));
    yr.add(points(r, 1));
  }
  xr.finish();
  yr.finish();
  const Canvas canvas(xr, yr);
  std::ostringstream out;
  out << open_svg();
  canvas.frame(out, title, "component 1", "component 2");
  out << std::setprecision(6);
  std::vector<int> seen;
  for (std::size_t r = 0; r < points.rows(); ++r) {
    const int label = labels[r];
    const auto colour = kPalette[static_cast<std::size_t>(label < 0 ? 7 : label) % 10];
    out << "<circle cx=\"" << canvas.px(points(r, 0)) << "\" cy=\"" << canvas.py(points(r, 1))
        << "\" r=\"2.5\" fill-opacity=\"0.6\" fill=\"" << colour << "\"/>\n";
    if (std::find(seen.begin(), seen.end(), label) == seen.end()) seen.push_back(label);
  }
  std::sort(seen.begin(), seen.end());
  for (std::size_t i = 0; i < seen.size() && i < 10; ++i) {
    const double y = kTop + 18.0 * static_cast<double>(i);
    out << "<rect x=\"" << kWidth - kRight + 14 << "\" y=\"" << y << "\" width=\"12\" height=\"12\" fill=\""
        << kPalette[static_cast<std::size_t>(seen[i] < 0 ? 7 : seen[i]) % 10] << "\"/>\n";
    out << "<text x=\"" << kWidth - kRight + 32 << "\" y=\"" << y + 10 << "\" font-size=\"12\">class " << seen[i]
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace diffgt
