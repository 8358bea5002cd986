#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hpwl/errors.hpp"

namespace hpwl::tools {

// Minimal hand-rolled SVG line chart: mean accuracy vs. feature count with
// one vertical bar per point for +/- one standard deviation.
inline void write_accuracy_chart(const std::filesystem::path& path,
                                 const std::vector<int>& counts, const std::vector<double>& mean,
                                 const std::vector<double>& stddev, const std::string& title) {
  if (counts.empty() || counts.size() != mean.size() || counts.size() != stddev.size())
    throw ConfigError("chart needs equal-length non-empty series");

  const double width = 720, height = 480;
  const double left = 70, right = 30, top = 50, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const double x_min = counts.front(), x_max = counts.back();
  const double x_span = x_max > x_min ? x_max - x_min : 1.0;

  auto sx = [&](double c) { return left + (c - x_min) / x_span * plot_w; };
  auto sy = [&](double a) { return top + (1.0 - a) * plot_h; };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return std::string(buf);
  };

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">"
      << title << "</text>\n";

  // axes
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 10; ++tick) {
    const double a = tick / 10.0;
    out << "<line x1=\"" << left - 4 << "\" y1=\"" << sy(a) << "\" x2=\"" << left << "\" y2=\""
        << sy(a) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << sy(a) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << num(a) << "</text>\n";
  }
  for (int c : counts) {
    out << "<line x1=\"" << sx(c) << "\" y1=\"" << top + plot_h << "\" x2=\"" << sx(c)
        << "\" y2=\"" << top + plot_h + 4 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << sx(c) << "\" y=\"" << top + plot_h + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << c << "</text>\n";
  }
  out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 16
      << "\" text-anchor=\"middle\" font-size=\"13\">selected features</text>\n";
  out << "<text x=\"20\" y=\"" << top + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 "
      << top + plot_h / 2 << ")\">accuracy</text>\n";

  // +/- one standard deviation bars
  for (size_t i = 0; i < counts.size(); ++i) {
    const double lo = std::max(0.0, mean[i] - stddev[i]);
    const double hi = std::min(1.0, mean[i] + stddev[i]);
    out << "<line x1=\"" << sx(counts[i]) << "\" y1=\"" << sy(lo) << "\" x2=\"" << sx(counts[i])
        << "\" y2=\"" << sy(hi) << "\" stroke=\"#9db8d9\" stroke-width=\"2\"/>\n";
  }

  out << "<polyline fill=\"none\" stroke=\"#1f5fae\" stroke-width=\"2\" points=\"";
  for (size_t i = 0; i < counts.size(); ++i) {
    if (i) out << ' ';
    out << num(sx(counts[i])) << ',' << num(sy(mean[i]));
  }
  out << "\"/>\n";
  for (size_t i = 0; i < counts.size(); ++i)
    out << "<circle cx=\"" << sx(counts[i]) << "\" cy=\"" << sy(mean[i])
        << "\" r=\"3\" fill=\"#1f5fae\"/>\n";
  out << "</svg>\n";
}

}  // namespace hpwl::tools
