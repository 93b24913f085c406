#pragma once

// SVG rendering of one evaluated sample: GT boxes in red, detections in blue,
// pseudo character centers as red dots. Don't-care GTs and excluded
// detections are drawn dashed in grey.

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>

#include "tedeval/annotation_io.hpp"
#include "tedeval/matching.hpp"
#include "tedeval/scoring.hpp"

namespace tedeval {

namespace detail {

inline std::string svg_number(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  std::string s(buf, end);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

inline std::string svg_points(const Quad& q) {
  std::string out;
  for (std::size_t k = 0; k < 4; ++k) {
    if (k) out += ' ';
    out += svg_number(q.v[k].x) + "," + svg_number(q.v[k].y);
  }
  return out;
}

}  // namespace detail

inline std::string overlay_svg(const Sample& sample, const MatchMatrix& matrix,
                               const CharTally& tally) {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  bool any = false;
  const auto extend = [&](const Quad& q) {
    for (const Point& p : q.v) {
      if (!any) {
        min_x = max_x = p.x;
        min_y = max_y = p.y;
        any = true;
      }
      min_x = std::min(min_x, p.x);
      max_x = std::max(max_x, p.x);
      min_y = std::min(min_y, p.y);
      max_y = std::max(max_y, p.y);
    }
  };
  for (const auto& g : sample.gts) extend(g.quad);
  for (const auto& d : sample.dets) extend(d.quad);

  constexpr double kMargin = 10.0;
  const double x0 = any ? min_x - kMargin : 0.0;
  const double y0 = any ? min_y - kMargin : 0.0;
  const double w = any ? max_x - min_x + 2 * kMargin : 100.0;
  const double h = any ? max_y - min_y + 2 * kMargin : 100.0;
  const double dot = std::max(1.0, std::min(w, h) / 200.0);

  using detail::svg_number;
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + svg_number(w) + "\" height=\"" +
         svg_number(h) + "\" viewBox=\"" + svg_number(x0) + " " + svg_number(y0) + " " +
         svg_number(w) + " " + svg_number(h) + "\">\n";
  out += "<title>" + sample.id + "</title>\n";

  for (std::size_t i = 0; i < sample.gts.size(); ++i) {
    const bool dc = matrix.gt_dont_care(i);
    out += "<polygon class=\"" + std::string(dc ? "gt dont-care" : "gt") + "\" data-index=\"" +
           std::to_string(i) + "\" points=\"" + detail::svg_points(sample.gts[i].quad) + "\" " +
           (dc ? "fill=\"none\" stroke=\"#808080\" stroke-dasharray=\"4 2\""
               : "fill=\"none\" stroke=\"#ff0000\"") +
           "/>\n";
  }
  for (std::size_t j = 0; j < sample.dets.size(); ++j) {
    const bool ex = matrix.det_excluded(j);
    out += "<polygon class=\"" + std::string(ex ? "det excluded" : "det") + "\" data-index=\"" +
           std::to_string(j) + "\" points=\"" + detail::svg_points(sample.dets[j].quad) + "\" " +
           (ex ? "fill=\"none\" stroke=\"#808080\" stroke-dasharray=\"2 2\""
               : "fill=\"none\" stroke=\"#0000ff\"") +
           "/>\n";
  }
  for (std::size_t i = 0; i < sample.gts.size(); ++i) {
    if (matrix.gt_dont_care(i)) continue;
    const PccSet centers = pcc(sample.gts[i]);
    for (std::size_t k = 0; k < centers.centers.size(); ++k) {
      const int s = tally.length(i) > k ? tally.s(i, k) : 0;
      out += "<circle class=\"pcc\" data-gt=\"" + std::to_string(i) + "\" data-s=\"" +
             std::to_string(s) + "\" cx=\"" + svg_number(centers.centers[k].x) + "\" cy=\"" +
             svg_number(centers.centers[k].y) + "\" r=\"" + svg_number(dot) +
             "\" fill=\"#ff0000\"/>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

inline void render_overlay(const Sample& sample, const MatchMatrix& matrix, const CharTally& tally,
                           const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write overlay " + path.string());
  out << overlay_svg(sample, matrix, tally);
  if (!out) throw IoError("failed writing overlay " + path.string());
}

}  // namespace tedeval
