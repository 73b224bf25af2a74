#pragma once

// Native SVG contour rendering of a 2D loss slice via marching squares.
// Exactly eight isolines with equal gaps strictly between the grid minimum
// and maximum, matching the plotting convention used for these landscapes.

#include <algorithm>
#include <array>
#include <string>
#include <vector>

#include "lprobe/io.hpp"
#include "lprobe/landscape.hpp"

namespace lprobe {

namespace detail {

struct SegmentSink {
  std::string path;
  double origin_px, size_px;
  int n;

  // Grid coordinates (cell units) to pixel coordinates; SVG y grows down.
  void add(double x1, double y1, double x2, double y2) {
    const auto px = [&](double g) { return origin_px + g / n * size_px; };
    const auto py = [&](double g) { return origin_px + (1.0 - g / n) * size_px; };
    char buf[128];
    std::snprintf(buf, sizeof(buf), "M%.2f %.2f L%.2f %.2f ", px(x1), py(y1),
                  px(x2), py(y2));
    path += buf;
  }
};

// Linear interpolation of the level crossing between two corner values.
inline double crossing(double va, double vb, double level) {
  const double denom = vb - va;
  if (denom == 0.0) return 0.5;
  return std::clamp((level - va) / denom, 0.0, 1.0);
}

}  // namespace detail

/// One marching-squares pass for a single level; emits line segments.
inline void marching_squares(const Slice2D& slice, double level,
                             detail::SegmentSink& sink) {
  const int n = slice.n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // Corners of cell (i,j); grid x = alpha index i, grid y = beta index j.
      const double v00 = slice.at(i, j);
      const double v10 = slice.at(i + 1, j);
      const double v11 = slice.at(i + 1, j + 1);
      const double v01 = slice.at(i, j + 1);
      int mask = 0;
      if (v00 > level) mask |= 1;
      if (v10 > level) mask |= 2;
      if (v11 > level) mask |= 4;
      if (v01 > level) mask |= 8;
      if (mask == 0 || mask == 15) continue;

      const double x = i, y = j;
      // Edge crossing points.
      const double bx = x + detail::crossing(v00, v10, level), by = y;       // bottom
      const double rx = x + 1, ry = y + detail::crossing(v10, v11, level);   // right
      const double tx = x + detail::crossing(v01, v11, level), ty = y + 1;   // top
      const double lx = x, ly = y + detail::crossing(v00, v01, level);       // left

      switch (mask) {
        case 1: case 14: sink.add(lx, ly, bx, by); break;
        case 2: case 13: sink.add(bx, by, rx, ry); break;
        case 4: case 11: sink.add(rx, ry, tx, ty); break;
        case 8: case 7:  sink.add(tx, ty, lx, ly); break;
        case 3: case 12: sink.add(lx, ly, rx, ry); break;
        case 6: case 9:  sink.add(bx, by, tx, ty); break;
        case 5: case 10: {
          // Saddle: disambiguate with the cell-center value.
          const double center = 0.25 * (v00 + v10 + v11 + v01);
          const bool center_high = center > level;
          if ((mask == 5) == center_high) {
            sink.add(lx, ly, tx, ty);
            sink.add(bx, by, rx, ry);
          } else {
            sink.add(lx, ly, bx, by);
            sink.add(rx, ry, tx, ty);
          }
          break;
        }
        default: break;
      }
    }
  }
}

/// Contour plot with exactly 8 equally spaced isolines between the grid
/// minimum and maximum (range divided into 9 gaps, lines at the 8 interior
/// levels).
inline std::string contour_svg(const Slice2D& slice, int size_px = 640) {
  static const std::array<const char*, 8> palette = {
      "#30123b", "#4669db", "#26bce1", "#3fe28f",
      "#b6de2b", "#fbb938", "#f05b12", "#7a0403"};
  const double margin = 40.0;
  const double plot = size_px - 2.0 * margin;
  const double lo = *std::min_element(slice.values.begin(), slice.values.end());
  const double hi = *std::max_element(slice.values.begin(), slice.values.end());

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(size_px) + "\" height=\"" + std::to_string(size_px) +
         "\" viewBox=\"0 0 " + std::to_string(size_px) + " " +
         std::to_string(size_px) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  char frame[256];
  std::snprintf(frame, sizeof(frame),
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
                "fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n",
                margin, margin, plot, plot);
  svg += frame;

  if (hi > lo) {
    for (int level_idx = 1; level_idx <= 8; ++level_idx) {
      const double level = lo + level_idx * (hi - lo) / 9.0;
      detail::SegmentSink sink{std::string{}, margin, plot, slice.n};
      marching_squares(slice, level, sink);
      if (sink.path.empty()) continue;
      svg += "<path d=\"" + sink.path + "\" fill=\"none\" stroke=\"" +
             palette[level_idx - 1] + "\" stroke-width=\"1.2\"/>\n";
    }
  }

  // Axis annotations: the slice spans [-l, l] in both directions.
  char label[256];
  std::snprintf(label, sizeof(label),
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">-l</text>"
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">+l</text>"
                "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">l=%s  range=[%s, %s]</text>\n",
                margin - 4.0, size_px - margin + 16.0,
                margin + plot - 8.0, size_px - margin + 16.0, margin,
                margin - 12.0, fmt_g17(slice.l).c_str(), fmt_g17(lo).c_str(),
                fmt_g17(hi).c_str());
  svg += label;
  svg += "</svg>\n";
  return svg;
}

}  // namespace lprobe
