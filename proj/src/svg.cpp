#include "exirt/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace exirt::svg {

namespace {

constexpr double kWidth = 720, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 110;
constexpr std::array<const char*, 8> kPalette{"#4477aa", "#ee6677", "#228833", "#ccbb44",
                                              "#66ccee", "#aa3377", "#bbbbbb", "#000000"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Scale {
  double lo, hi, px_lo, px_hi;
  double operator()(double v) const {
    if (hi == lo) return 0.5 * (px_lo + px_hi);
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

std::pair<double, double> padded_range(double lo, double hi, bool include_zero) {
  if (include_zero) {
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) return {0.0, 1.0};
  if (hi == lo) return {lo - 1.0, hi + 1.0};
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

std::string header(const std::string& title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" font-family=\"sans-serif\" "
      "font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
      kWidth, kHeight, kWidth / 2, escape(title));
}

std::string y_axis(const Scale& y, const std::string& label) {
  std::string s = fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"black\"/>\n",
                              kLeft, kTop, kHeight - kBottom);
  for (int k = 0; k <= 4; ++k) {
    const double v = y.lo + (y.hi - y.lo) * k / 4.0;
    const double py = y(v);
    s += fmt::format(
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#dddddd\"/>\n"
        "<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.3g}</text>\n",
        kLeft, py, kWidth - kRight, py, kLeft - 4, py + 4, v);
  }
  s += fmt::format(
      "<text transform=\"translate(16,{:.1f}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
      (kTop + kHeight - kBottom) / 2, escape(label));
  return s;
}

std::string category_label(double x, const std::string& label) {
  return fmt::format(
      "<text transform=\"translate({:.1f},{:.1f}) rotate(-40)\" text-anchor=\"end\">{}</text>\n", x,
      kHeight - kBottom + 14, escape(label));
}

}  // namespace

std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values, const std::string& y_label) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  auto [ylo, yhi] = padded_range(values.empty() ? 0.0 : lo, values.empty() ? 1.0 : hi, true);
  Scale y{ylo, yhi, kHeight - kBottom, kTop};
  std::string s = header(title) + y_axis(y, y_label);
  const double slot = (kWidth - kLeft - kRight) / std::max<std::size_t>(1, values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = kLeft + slot * static_cast<double>(i) + 0.15 * slot;
    const double top = std::min(y(values[i]), y(0.0));
    const double h = std::abs(y(values[i]) - y(0.0));
    s += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"{}\"/>\n", x, top,
                     0.7 * slot, h, kPalette[0]);
    s += category_label(x + 0.35 * slot, labels[i]);
  }
  return s + "</svg>\n";
}

std::string box_chart(const std::string& title, const std::vector<Box>& boxes, const std::string& y_label) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& b : boxes) {
    lo = std::min(lo, b.whisker_low);
    hi = std::max(hi, b.whisker_high);
    for (double o : b.outliers) {
      lo = std::min(lo, o);
      hi = std::max(hi, o);
    }
  }
  auto [ylo, yhi] = padded_range(boxes.empty() ? 0.0 : lo, boxes.empty() ? 1.0 : hi, false);
  Scale y{ylo, yhi, kHeight - kBottom, kTop};
  std::string s = header(title) + y_axis(y, y_label);
  const double slot = (kWidth - kLeft - kRight) / std::max<std::size_t>(1, boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& b = boxes[i];
    const double cx = kLeft + slot * (static_cast<double>(i) + 0.5);
    const double w = 0.5 * slot;
    s += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"black\"/>\n", cx,
                     y(b.whisker_low), y(b.whisker_high));
    s += fmt::format(
        "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"{}\" stroke=\"black\"/>\n",
        cx - w / 2, y(b.q3), w, std::abs(y(b.q1) - y(b.q3)), kPalette[i % kPalette.size()]);
    s += fmt::format("<line x1=\"{0:.1f}\" y1=\"{2:.1f}\" x2=\"{1:.1f}\" y2=\"{2:.1f}\" stroke=\"black\" "
                     "stroke-width=\"2\"/>\n",
                     cx - w / 2, cx + w / 2, y(b.median));
    for (double o : b.outliers)
      s += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"none\" stroke=\"black\"/>\n", cx, y(o));
    s += category_label(cx, b.label);
  }
  return s + "</svg>\n";
}

std::string line_chart(const std::string& title, const std::vector<double>& x, const std::vector<Series>& series,
                       const std::string& x_label, const std::string& y_label) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& se : series)
    for (double v : se.y) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  auto [ylo, yhi] = padded_range(series.empty() ? 0.0 : lo, series.empty() ? 1.0 : hi, false);
  Scale ys{ylo, yhi, kHeight - kBottom, kTop};
  const double xlo = x.empty() ? 0.0 : x.front(), xhi = x.empty() ? 1.0 : x.back();
  Scale xs{xlo, xhi, kLeft, kWidth - kRight};
  std::string s = header(title) + y_axis(ys, y_label);
  s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", (kLeft + kWidth) / 2,
                   kHeight - kBottom + 30, escape(x_label));
  for (std::size_t k = 0; k < series.size(); ++k) {
    std::string pts;
    for (std::size_t i = 0; i < x.size() && i < series[k].y.size(); ++i)
      pts += fmt::format("{}{:.1f},{:.1f}", i ? " " : "", xs(x[i]), ys(series[k].y[i]));
    const char* color = kPalette[k % kPalette.size()];
    s += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", pts, color);
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" fill=\"{}\">{}</text>\n", kLeft + 10,
                     kHeight - kBottom + 50 + 14 * static_cast<double>(k), color, escape(series[k].name));
  }
  return s + "</svg>\n";
}

std::string scatter_chart(const std::string& title, const std::vector<Point>& points, const std::string& x_label,
                          const std::string& y_label) {
  double xl = std::numeric_limits<double>::infinity(), xh = -xl, yl = xl, yh = -xl;
  for (const auto& p : points) {
    xl = std::min(xl, p.x);
    xh = std::max(xh, p.x);
    yl = std::min(yl, p.y);
    yh = std::max(yh, p.y);
  }
  auto [x0, x1] = padded_range(points.empty() ? 0.0 : xl, points.empty() ? 1.0 : xh, false);
  auto [y0, y1] = padded_range(points.empty() ? 0.0 : yl, points.empty() ? 1.0 : yh, false);
  Scale xs{x0, x1, kLeft, kWidth - kRight};
  Scale ys{y0, y1, kHeight - kBottom, kTop};
  std::string s = header(title) + y_axis(ys, y_label);
  s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", (kLeft + kWidth) / 2,
                   kHeight - kBottom + 30, escape(x_label));
  for (const auto& p : points) {
    const char* color = kPalette[static_cast<std::size_t>(std::max(0, p.group)) % kPalette.size()];
    s += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"4\" fill=\"{}\"/>\n", xs(p.x), ys(p.y), color);
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"9\">{}</text>\n", xs(p.x) + 5, ys(p.y) - 5,
                     escape(p.label));
  }
  return s + "</svg>\n";
}

}  // namespace exirt::svg
