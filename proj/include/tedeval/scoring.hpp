#pragma once

// Character-level scoring over an instance match table.
//
// Each GT word is cut into `length` pseudo characters whose centers sit
// evenly along the line joining the midpoints of its left and right edges.
// A character is recalled when exactly one matched detection contains its
// center; a detection's precision is the fraction of characters it contains
// among all characters of the GTs it is matched with.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tedeval/annotation_io.hpp"
#include "tedeval/detail/exact_sum.hpp"
#include "tedeval/error.hpp"
#include "tedeval/geometry.hpp"
#include "tedeval/matching.hpp"

namespace tedeval {

struct PccSet {
  std::vector<Point> centers;
};

inline PccSet pcc(const GtInstance& g) {
  if (g.dont_care) throw ContractError("pseudo character centers of a don't-care GT");
  if (g.length == 0) throw ContractError("pseudo character centers need a positive length");
  const auto& v = g.quad.v;
  const Point left{(v[0].x + v[3].x) / 2.0, (v[0].y + v[3].y) / 2.0};
  const Point right{(v[1].x + v[2].x) / 2.0, (v[1].y + v[2].y) / 2.0};
  const double w = right.x - left.x;
  const double h = right.y - left.y;
  const auto l = static_cast<double>(g.length);
  PccSet out;
  out.centers.reserve(g.length);
  for (std::size_t k = 1; k <= g.length; ++k) {
    const double step = static_cast<double>(k) - 0.5;
    out.centers.push_back({left.x + w / l * step, left.y + h / l * step});
  }
  return out;
}

// m[i][j][k] and the row sums s[i][k]. Don't-care GTs have empty rows.
class CharTally {
 public:
  CharTally() = default;
  CharTally(std::size_t num_gts, std::size_t num_dets)
      : num_gts_(num_gts), num_dets_(num_dets), cells_(num_gts * num_dets), sums_(num_gts) {}

  std::size_t num_gts() const noexcept { return num_gts_; }
  std::size_t num_dets() const noexcept { return num_dets_; }

  // Characters tallied for GT i; zero for don't-care rows.
  std::size_t length(std::size_t gt) const { return sums_.at(gt).size(); }

  int m(std::size_t gt, std::size_t det, std::size_t k) const {
    const auto& cell = cells_.at(gt * num_dets_ + det);
    return cell.empty() ? 0 : cell.at(k);
  }
  int s(std::size_t gt, std::size_t k) const { return sums_.at(gt).at(k); }
  std::span<const int> row_sums(std::size_t gt) const { return sums_.at(gt); }

  // Number of characters of GT `gt` that detection `det` contains.
  int contained(std::size_t gt, std::size_t det) const {
    int n = 0;
    for (auto b : cells_.at(gt * num_dets_ + det)) n += b;
    return n;
  }

  void init_row(std::size_t gt, std::size_t length) { sums_.at(gt).assign(length, 0); }
  void mark(std::size_t gt, std::size_t det, std::size_t k) {
    auto& cell = cells_.at(gt * num_dets_ + det);
    if (cell.empty()) cell.assign(sums_.at(gt).size(), 0);
    if (!cell.at(k)) {
      cell[k] = 1;
      ++sums_[gt][k];
    }
  }

 private:
  std::size_t num_gts_ = 0;
  std::size_t num_dets_ = 0;
  std::vector<std::vector<std::uint8_t>> cells_;
  std::vector<std::vector<int>> sums_;
};

inline CharTally char_tally(const Sample& sample, const MatchMatrix& matrix) {
  const std::size_t G = sample.gts.size();
  const std::size_t D = sample.dets.size();
  if (matrix.num_gts() != G || matrix.num_dets() != D) {
    throw ContractError("match matrix does not belong to this sample");
  }
  CharTally tally(G, D);
  for (std::size_t i = 0; i < G; ++i) {
    if (matrix.gt_dont_care(i)) continue;
    const PccSet centers = pcc(sample.gts[i]);
    tally.init_row(i, centers.centers.size());
    for (std::size_t j = 0; j < D; ++j) {
      if (!matrix.at(i, j)) continue;
      for (std::size_t k = 0; k < centers.centers.size(); ++k) {
        if (contains_point(sample.dets[j].quad, centers.centers[k])) tally.mark(i, j, k);
      }
    }
  }
  return tally;
}

// Fraction of GT i's characters detected exactly once.
inline double gt_recall(std::size_t i, const CharTally& tally) {
  const std::size_t l = tally.length(i);
  if (l == 0) throw ContractError("recall of a don't-care GT");
  std::size_t correct = 0;
  for (int s : tally.row_sums(i)) correct += s == 1;
  return static_cast<double>(correct) / static_cast<double>(l);
}

// Characters detection j contains over the total length of its matched GTs;
// 0 for an unmatched detection.
inline double det_precision(std::size_t j, const CharTally& tally, const MatchMatrix& matrix) {
  long long hit = 0;
  long long total = 0;
  for (std::size_t i : matrix.gts_of(j)) {
    hit += tally.contained(i, j);
    total += static_cast<long long>(tally.length(i));
  }
  return total == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(total);
}

inline double hmean(double recall, double precision) {
  return recall + precision == 0.0 ? 0.0 : 2.0 * recall * precision / (recall + precision);
}

// Pooled sums behind a recall/precision pair. With no scorable GTs recall is
// 1; with no scorable detections precision is 1 if there are no GTs either,
// else 0.
struct ScoreSums {
  double recall_sum = 0.0;
  std::size_t num_gt = 0;
  double precision_sum = 0.0;
  std::size_t num_det = 0;

  double recall() const {
    return num_gt == 0 ? 1.0 : recall_sum / static_cast<double>(num_gt);
  }
  double precision() const {
    if (num_det == 0) return num_gt == 0 ? 1.0 : 0.0;
    return precision_sum / static_cast<double>(num_det);
  }
  double hmean() const { return tedeval::hmean(recall(), precision()); }
};

struct SampleScore {
  // Indexed like the sample's GTs / detections; empty for don't-care GTs and
  // excluded detections.
  std::vector<std::optional<double>> per_gt_recall;
  std::vector<std::optional<double>> per_det_precision;
  ScoreSums sums;
  double recall = 0.0;
  double precision = 0.0;
  double hmean = 0.0;
};

struct DatasetScore {
  ScoreSums sums;
  double recall = 0.0;
  double precision = 0.0;
  double hmean = 0.0;
};

inline SampleScore score_sample(const Sample& sample, const MatchMatrix& matrix,
                                const CharTally& tally) {
  SampleScore out;
  detail::ExactSum recall_sum;
  detail::ExactSum precision_sum;
  out.per_gt_recall.resize(sample.gts.size());
  out.per_det_precision.resize(sample.dets.size());
  for (std::size_t i = 0; i < sample.gts.size(); ++i) {
    if (matrix.gt_dont_care(i)) continue;
    const double r = gt_recall(i, tally);
    out.per_gt_recall[i] = r;
    recall_sum += r;
    ++out.sums.num_gt;
  }
  for (std::size_t j = 0; j < sample.dets.size(); ++j) {
    if (matrix.det_excluded(j)) continue;
    const double p = det_precision(j, tally, matrix);
    out.per_det_precision[j] = p;
    precision_sum += p;
    ++out.sums.num_det;
  }
  out.sums.recall_sum = recall_sum.value();
  out.sums.precision_sum = precision_sum.value();
  out.recall = out.sums.recall();
  out.precision = out.sums.precision();
  out.hmean = out.sums.hmean();
  return out;
}

inline SampleScore score_sample(const Sample& sample, const MatchMatrix& matrix) {
  return score_sample(sample, matrix, char_tally(sample, matrix));
}

// Micro-average: pools every GT and detection of the dataset.
inline DatasetScore aggregate_dataset(std::span<const ScoreSums> per_sample) {
  if (per_sample.empty()) throw ContractError("cannot aggregate an empty dataset");
  detail::ExactSum recall_sum;
  detail::ExactSum precision_sum;
  DatasetScore out;
  for (const ScoreSums& s : per_sample) {
    recall_sum += s.recall_sum;
    precision_sum += s.precision_sum;
    out.sums.num_gt += s.num_gt;
    out.sums.num_det += s.num_det;
  }
  out.sums.recall_sum = recall_sum.value();
  out.sums.precision_sum = precision_sum.value();
  out.recall = out.sums.recall();
  out.precision = out.sums.precision();
  out.hmean = out.sums.hmean();
  return out;
}

inline DatasetScore aggregate_dataset(std::span<const SampleScore> scores) {
  std::vector<ScoreSums> sums;
  sums.reserve(scores.size());
  for (const SampleScore& s : scores) sums.push_back(s.sums);
  return aggregate_dataset(std::span<const ScoreSums>(sums));
}

}  // namespace tedeval
