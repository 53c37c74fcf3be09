#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "kci/errors.hpp"
#include "kci/serialize.hpp"

namespace kci {

// Static SVG line plots with deterministic bytes: fixed canvas, fixed
// 2-decimal pixel coordinates, no timestamps or generator tags.

enum class PlotKind { lines, band, steps };

struct PlotSeries {
  std::string name;
  std::vector<double> y;
};

struct PlotData {
  std::string title;
  std::vector<double> x;
  std::vector<PlotSeries> series;
  std::vector<double> band_lower, band_upper;  // optional shaded band
};

namespace detail {

inline std::string px(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

inline std::string render_plot_svg(const PlotData& data, PlotKind kind) {
  require(!data.x.empty(), "plot needs data points");
  require(!data.series.empty() || !data.band_lower.empty(), "plot needs at least one series");
  for (const auto& s : data.series)
    require(s.y.size() == data.x.size(), "series '" + s.name + "' length does not match x");
  require(data.band_lower.size() == data.band_upper.size(),
          "band lower and upper must have equal length");
  if (!data.band_lower.empty())
    require(data.band_lower.size() == data.x.size(), "band length does not match x");
  if (kind == PlotKind::band)
    require(!data.band_lower.empty(), "band plot needs band data");

  double xmin = data.x.front(), xmax = data.x.front();
  for (double v : data.x) {
    require(std::isfinite(v), "plot x values must be finite");
    xmin = std::min(xmin, v);
    xmax = std::max(xmax, v);
  }
  double ymin = 0.0, ymax = 0.0;
  bool first = true;
  auto fold = [&](double v) {
    require(std::isfinite(v), "plot y values must be finite");
    if (first) {
      ymin = ymax = v;
      first = false;
    } else {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  };
  for (const auto& s : data.series)
    for (double v : s.y) fold(v);
  for (double v : data.band_lower) fold(v);
  for (double v : data.band_upper) fold(v);

  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax == ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  const double W = 800, H = 500, L = 60, R = 20, T = 40, B = 45;
  const double pw = W - L - R, ph = H - T - B;
  auto X = [&](double v) { return L + pw * (v - xmin) / (xmax - xmin); };
  auto Y = [&](double v) { return T + ph * (ymax - v) / (ymax - ymin); };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#9467bd", "#ff7f0e", "#8c564b"};
  const size_t ncolors = sizeof(palette) / sizeof(palette[0]);

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
         "viewBox=\"0 0 800 500\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"#ffffff\"/>\n";
  if (!data.title.empty())
    svg << "<text x=\"400\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" "
           "text-anchor=\"middle\">"
        << detail::xml_escape(data.title) << "</text>\n";

  // frame and horizontal grid with value labels
  svg << "<rect x=\"" << detail::px(L) << "\" y=\"" << detail::px(T) << "\" width=\""
      << detail::px(pw) << "\" height=\"" << detail::px(ph)
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  for (int g = 0; g <= 4; ++g) {
    double f = g / 4.0;
    double yv = ymin + f * (ymax - ymin);
    double yp = Y(yv);
    if (g > 0 && g < 4)
      svg << "<line x1=\"" << detail::px(L) << "\" y1=\"" << detail::px(yp) << "\" x2=\""
          << detail::px(L + pw) << "\" y2=\"" << detail::px(yp)
          << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << detail::px(L - 6) << "\" y=\"" << detail::px(yp + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">"
        << format_double(yv) << "</text>\n";
  }
  for (int g = 0; g <= 4; ++g) {
    double xv = xmin + (g / 4.0) * (xmax - xmin);
    svg << "<text x=\"" << detail::px(X(xv)) << "\" y=\"" << detail::px(T + ph + 18)
        << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
        << format_double(xv) << "</text>\n";
  }

  if (!data.band_lower.empty()) {
    svg << "<path d=\"M";
    for (size_t i = 0; i < data.x.size(); ++i)
      svg << (i ? " L" : "") << detail::px(X(data.x[i])) << "," << detail::px(Y(data.band_lower[i]));
    for (size_t i = data.x.size(); i-- > 0;)
      svg << " L" << detail::px(X(data.x[i])) << "," << detail::px(Y(data.band_upper[i]));
    svg << " Z\" fill=\"#1f77b4\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
  }

  for (size_t s = 0; s < data.series.size(); ++s) {
    const auto& ser = data.series[s];
    const char* color = palette[s % ncolors];
    if (kind == PlotKind::steps) {
      svg << "<path d=\"M" << detail::px(X(data.x[0])) << "," << detail::px(Y(ser.y[0]));
      for (size_t i = 1; i < data.x.size(); ++i) {
        svg << " L" << detail::px(X(data.x[i])) << "," << detail::px(Y(ser.y[i - 1]));
        svg << " L" << detail::px(X(data.x[i])) << "," << detail::px(Y(ser.y[i]));
      }
      svg << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    } else {
      svg << "<polyline points=\"";
      for (size_t i = 0; i < data.x.size(); ++i)
        svg << (i ? " " : "") << detail::px(X(data.x[i])) << "," << detail::px(Y(ser.y[i]));
      svg << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    }
    if (!ser.name.empty()) {
      double ly = T + 14 + 16.0 * static_cast<double>(s);
      svg << "<line x1=\"" << detail::px(L + pw - 110) << "\" y1=\"" << detail::px(ly - 4)
          << "\" x2=\"" << detail::px(L + pw - 90) << "\" y2=\"" << detail::px(ly - 4)
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << detail::px(L + pw - 84) << "\" y=\"" << detail::px(ly)
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << detail::xml_escape(ser.name)
          << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

inline void emit_plot(const PlotData& data, PlotKind kind, const std::string& path) {
  write_text_file(path, render_plot_svg(data, kind));
}

}  // namespace kci
