#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qna/calendar.hpp"
#include "qna/signals.hpp"

namespace qna::svg {

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string format_tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string escape(const std::string& s) {
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

struct Range {
  double lo = 0.0, hi = 1.0;
};

inline Range value_range(const IndicatorSeries& s) {
  double lo = INFINITY, hi = -INFINITY;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s.has_value(i)) continue;
    lo = std::min(lo, s.values[i]);
    hi = std::max(hi, s.values[i]);
  }
  if (!std::isfinite(lo)) return {};
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

}  // namespace detail

struct ChartOptions {
  std::string title;
  int width = 960;
  int height = 420;
  std::string left_color = "#1f77b4";
  std::string right_color = "#7f7f7f";
  std::vector<Date> markers;  ///< vertical lines (e.g. an event date)
};

/// Two series on a shared date axis, each scaled to its own y-axis.
/// Missing values break the polyline.
inline std::string dual_axis_chart(const IndicatorSeries& left, const IndicatorSeries& right,
                                   const ChartOptions& opt = {}) {
  using detail::num;
  const double ml = 70, mr = 70, mt = 40, mb = 50;
  const double pw = opt.width - ml - mr, ph = opt.height - mt - mb;

  long x0 = 0, x1 = 1;
  bool any = false;
  for (const auto* s : {&left, &right}) {
    for (const auto& d : s->dates) {
      if (!any) {
        x0 = x1 = d.serial();
        any = true;
      }
      x0 = std::min(x0, d.serial());
      x1 = std::max(x1, d.serial());
    }
  }
  if (x1 == x0) x1 = x0 + 1;
  const auto px = [&](const Date& d) { return ml + pw * double(d.serial() - x0) / double(x1 - x0); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.width) + "\" height=\"" +
         std::to_string(opt.height) + "\" viewBox=\"0 0 " + std::to_string(opt.width) + " " +
         std::to_string(opt.height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(ml) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">" +
         detail::escape(opt.title) + "</text>\n";
  out += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"#333\"/>\n";

  const auto draw = [&](const IndicatorSeries& s, const std::string& color, bool left_axis) {
    const auto r = detail::value_range(s);
    const auto py = [&](double v) { return mt + ph * (1.0 - (v - r.lo) / (r.hi - r.lo)); };
    std::string points;
    const auto flush = [&] {
      if (!points.empty())
        out += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
      points.clear();
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s.has_value(i)) {
        flush();
        continue;
      }
      if (!points.empty()) points += ' ';
      points += num(px(s.dates[i])) + "," + num(py(s.values[i]));
    }
    flush();
    const double ax = left_axis ? ml - 6 : ml + pw + 6;
    const char* anchor = left_axis ? "end" : "start";
    for (int k = 0; k <= 4; ++k) {
      const double v = r.lo + (r.hi - r.lo) * k / 4.0;
      out += "<text x=\"" + num(ax) + "\" y=\"" + num(py(v) + 4) + "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" +
             color + "\" text-anchor=\"" + anchor + "\">" + detail::format_tick(v) + "</text>\n";
    }
    const double lx = left_axis ? ml : ml + pw - 160;
    out += "<text x=\"" + num(lx) + "\" y=\"" + num(opt.height - 14.0) + "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" +
           color + "\">" + detail::escape(s.name) + "</text>\n";
  };

  draw(left, opt.left_color, true);
  draw(right, opt.right_color, false);

  for (const auto& m : opt.markers) {
    const double x = px(m);
    out += "<line x1=\"" + num(x) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(x) + "\" y2=\"" + num(mt + ph) +
           "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n";
  }
  if (any) {
    for (const auto& d : {Date(std::chrono::sys_days{std::chrono::days{x0}}), Date(std::chrono::sys_days{std::chrono::days{x1}})}) {
      out += "<text x=\"" + num(px(d)) + "\" y=\"" + num(mt + ph + 16) +
             "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" + d.iso() + "</text>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace qna::svg
