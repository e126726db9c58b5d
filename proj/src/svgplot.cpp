#include "relgraph/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace relgraph {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 64, kRight = 24, kTop = 40, kBottom = 48;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Range {
  double lo = 0.0, hi = 1.0;
  void widen(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

std::ofstream open_svg(const std::string& path, const std::string& title) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";
  return out;
}

void draw_axes(std::ofstream& out, const Range& xr, const Range& yr,
               const std::string& x_label, const std::string& y_label) {
  const double x0 = kLeft, x1 = kWidth - kRight;
  const double y0 = kHeight - kBottom, y1 = kTop;
  out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\""
      << y0 << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\""
      << y1 << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = xr.lo + (xr.hi - xr.lo) * t / 4.0;
    const double px = x0 + (x1 - x0) * t / 4.0;
    out << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\""
        << y0 + 4 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px << "\" y=\"" << y0 + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << num(fx) << "</text>\n";
    const double fy = yr.lo + (yr.hi - yr.lo) * t / 4.0;
    const double py = y0 - (y0 - y1) * t / 4.0;
    out << "<line x1=\"" << x0 - 4 << "\" y1=\"" << py << "\" x2=\"" << x0
        << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << x0 - 8 << "\" y=\"" << py + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << num(fy) << "</text>\n";
  }
  out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << (y0 + y1) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << (y0 + y1) / 2 << ")\">" << y_label
      << "</text>\n";
}

}  // namespace

void write_svg_line_chart(const std::string& path, const std::string& title,
                          const std::string& x_label, const std::string& y_label,
                          const std::vector<SvgSeries>& series) {
  Range xr, yr;
  bool any = false;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!any) {
        xr.lo = xr.hi = s.x[i];
        yr.lo = yr.hi = s.y[i];
        any = true;
      }
      xr.widen(s.x[i]);
      yr.widen(s.y[i]);
    }
  }
  xr.finish();
  yr.finish();

  auto px = [&](double v) {
    return kLeft + (kWidth - kLeft - kRight) * (v - xr.lo) / (xr.hi - xr.lo);
  };
  auto py = [&](double v) {
    return kHeight - kBottom -
           (kHeight - kTop - kBottom) * (v - yr.lo) / (yr.hi - yr.lo);
  };

  auto out = open_svg(path, title);
  draw_axes(out, xr, yr, x_label, y_label);
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (i) out << ' ';
      out << num(px(s.x[i])) << ',' << num(py(s.y[i]));
    }
    out << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
          << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    }
    out << "<text x=\"" << kWidth - kRight - 6 << "\" y=\"" << kTop + 16 * (si + 1)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\""
        << color << "\">" << s.name << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_svg_box_chart(const std::string& path, const std::string& title,
                         const std::string& y_label, const std::vector<SvgBox>& boxes) {
  if (boxes.empty()) throw std::invalid_argument("write_svg_box_chart: no boxes");
  Range yr;
  yr.lo = yr.hi = boxes.front().lo;
  for (const auto& b : boxes) {
    yr.widen(b.lo);
    yr.widen(b.hi);
  }
  yr.finish();
  Range xr;
  xr.lo = 0;
  xr.hi = static_cast<double>(boxes.size());

  auto py = [&](double v) {
    return kHeight - kBottom -
           (kHeight - kTop - kBottom) * (v - yr.lo) / (yr.hi - yr.lo);
  };

  auto out = open_svg(path, title);
  draw_axes(out, xr, yr, "", y_label);
  const double span = (kWidth - kLeft - kRight) / static_cast<double>(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& b = boxes[i];
    const double cx = kLeft + span * (static_cast<double>(i) + 0.5);
    const double half = std::min(span * 0.3, 28.0);
    out << "<line x1=\"" << cx << "\" y1=\"" << num(py(b.lo)) << "\" x2=\"" << cx
        << "\" y2=\"" << num(py(b.hi)) << "\" stroke=\"black\"/>\n";
    for (double whisker : {b.lo, b.hi}) {
      out << "<line x1=\"" << cx - half / 2 << "\" y1=\"" << num(py(whisker))
          << "\" x2=\"" << cx + half / 2 << "\" y2=\"" << num(py(whisker))
          << "\" stroke=\"black\"/>\n";
    }
    out << "<rect x=\"" << cx - half << "\" y=\"" << num(py(b.q3)) << "\" width=\""
        << 2 * half << "\" height=\"" << num(py(b.q1) - py(b.q3))
        << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << cx - half << "\" y1=\"" << num(py(b.median)) << "\" x2=\""
        << cx + half << "\" y2=\"" << num(py(b.median))
        << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << cx << "\" y=\"" << kHeight - kBottom + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << b.name << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace relgraph
