#pragma once

// Pascal-VOC style IoU metric: exclusive one-to-one matching at a fixed IoU
// threshold. Kept alongside the character-level metric for comparison.

#include <algorithm>
#include <utility>
#include <vector>

#include "tedeval/annotation_io.hpp"
#include "tedeval/geometry.hpp"
#include "tedeval/matching.hpp"
#include "tedeval/scoring.hpp"

namespace tedeval {

inline constexpr double kIouThreshold = 0.5;

inline double iou(const Quad& a, const Quad& b) {
  const double inter = intersect_area(a, b);
  const double uni = area(a) + area(b) - inter;
  return uni <= 0.0 ? 0.0 : std::clamp(inter / uni, 0.0, 1.0);
}

struct IouResult {
  double recall = 0.0;
  double precision = 0.0;
  double hmean = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> matched_pairs;  // (gt, det)
  std::vector<bool> gt_dont_care;
  std::vector<bool> det_excluded;
  ScoreSums sums;
};

// Greedy assignment in descending IoU order; ties go to the lower GT index,
// then the lower detection index. Don't-care GTs and detections lying mostly
// inside one are left out of both denominators, using the same area precision
// rule as the character-level metric.
inline IouResult iou_evaluate(const Sample& sample, double threshold = kIouThreshold,
                              const Thresholds& exclusion = {}) {
  const std::size_t G = sample.gts.size();
  const std::size_t D = sample.dets.size();
  IouResult out;
  out.gt_dont_care.assign(G, false);
  out.det_excluded.assign(D, false);
  for (std::size_t i = 0; i < G; ++i) {
    if (!sample.gts[i].dont_care) continue;
    out.gt_dont_care[i] = true;
    for (std::size_t j = 0; j < D; ++j) {
      if (area_precision(sample.gts[i], sample.dets[j]) >= exclusion.area_precision_min) {
        out.det_excluded[j] = true;
      }
    }
  }

  struct Candidate {
    double iou;
    std::size_t gt;
    std::size_t det;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < G; ++i) {
    if (out.gt_dont_care[i]) continue;
    for (std::size_t j = 0; j < D; ++j) {
      if (out.det_excluded[j]) continue;
      const double v = iou(sample.gts[i].quad, sample.dets[j].quad);
      if (v >= threshold) candidates.push_back({v, i, j});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.iou > b.iou; });
  std::vector<bool> gt_used(G, false);
  std::vector<bool> det_used(D, false);
  for (const Candidate& c : candidates) {
    if (gt_used[c.gt] || det_used[c.det]) continue;
    gt_used[c.gt] = det_used[c.det] = true;
    out.matched_pairs.emplace_back(c.gt, c.det);
  }
  std::sort(out.matched_pairs.begin(), out.matched_pairs.end());

  const auto matched = static_cast<double>(out.matched_pairs.size());
  out.sums.num_gt = static_cast<std::size_t>(std::count(out.gt_dont_care.begin(), out.gt_dont_care.end(), false));
  out.sums.num_det = static_cast<std::size_t>(std::count(out.det_excluded.begin(), out.det_excluded.end(), false));
  out.sums.recall_sum = matched;
  out.sums.precision_sum = matched;
  out.recall = out.sums.recall();
  out.precision = out.sums.precision();
  out.hmean = out.sums.hmean();
  return out;
}

}  // namespace tedeval
