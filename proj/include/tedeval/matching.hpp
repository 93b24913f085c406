#pragma once

// Instance-level matching. Every viable one-to-one, one-to-many and
// many-to-one match is accepted; none is preferred over another. A GT/
// detection pair that takes part in several matches is marked once.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tedeval/annotation_io.hpp"
#include "tedeval/error.hpp"
#include "tedeval/geometry.hpp"

namespace tedeval {

struct Thresholds {
  double area_recall_min = 0.4;
  double area_precision_min = 0.4;
  double multiline_angle_min = kMultilineAngleDeg;

  void validate() const {
    if (!(area_recall_min > 0.0 && area_recall_min <= 1.0)) {
      throw ContractError("area recall threshold must lie in (0, 1]");
    }
    if (!(area_precision_min > 0.0 && area_precision_min <= 1.0)) {
      throw ContractError("area precision threshold must lie in (0, 1]");
    }
    if (!(multiline_angle_min > 0.0 && multiline_angle_min < 180.0)) {
      throw ContractError("multiline angle must lie in (0, 180) degrees");
    }
  }
};

enum class MatchKind { one_to_one, one_to_many, many_to_one };

inline std::string_view to_string(MatchKind k) {
  switch (k) {
    case MatchKind::one_to_one: return "one_to_one";
    case MatchKind::one_to_many: return "one_to_many";
    case MatchKind::many_to_one: return "many_to_one";
  }
  return "unknown";
}

struct Match {
  MatchKind kind = MatchKind::one_to_one;
  std::vector<std::size_t> gts;
  std::vector<std::size_t> dets;

  friend bool operator==(const Match&, const Match&) = default;
};

// Binary |G| x |D| table. Setting an entry twice leaves it at 1.
class MatchMatrix {
 public:
  MatchMatrix() = default;
  MatchMatrix(std::size_t num_gts, std::size_t num_dets)
      : num_gts_(num_gts),
        num_dets_(num_dets),
        entries_(num_gts * num_dets, 0),
        gt_dont_care_(num_gts, false),
        det_excluded_(num_dets, false) {}

  std::size_t num_gts() const noexcept { return num_gts_; }
  std::size_t num_dets() const noexcept { return num_dets_; }

  bool at(std::size_t gt, std::size_t det) const { return entries_.at(gt * num_dets_ + det) != 0; }
  void set(std::size_t gt, std::size_t det) { entries_.at(gt * num_dets_ + det) = 1; }

  // M_j: the GTs matched with detection `det`, in index order.
  std::vector<std::size_t> gts_of(std::size_t det) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < num_gts_; ++i) {
      if (at(i, det)) out.push_back(i);
    }
    return out;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto e : entries_) n += e;
    return n;
  }

  bool gt_dont_care(std::size_t gt) const { return gt_dont_care_.at(gt); }
  bool det_excluded(std::size_t det) const { return det_excluded_.at(det); }
  void mark_dont_care(std::size_t gt) { gt_dont_care_.at(gt) = true; }
  void mark_excluded(std::size_t det) { det_excluded_.at(det) = true; }

  // Every accepted match, including ones whose entries were already set.
  std::vector<Match> matches;
  // Many-groups that passed the area tests but were turned down as multiline.
  std::vector<Match> multiline_rejections;

  friend bool operator==(const MatchMatrix&, const MatchMatrix&) = default;

 private:
  std::size_t num_gts_ = 0;
  std::size_t num_dets_ = 0;
  std::vector<std::uint8_t> entries_;
  std::vector<bool> gt_dont_care_;
  std::vector<bool> det_excluded_;
};

inline double area_recall(const GtInstance& g, const DetInstance& d) {
  return intersect_area(g.quad, d.quad) / area(g.quad);
}

inline double area_precision(const GtInstance& g, const DetInstance& d) {
  return intersect_area(g.quad, d.quad) / area(d.quad);
}

inline bool match_one_to_one(const GtInstance& g, const DetInstance& d, const Thresholds& t) {
  return area_recall(g, d) >= t.area_recall_min && area_precision(g, d) >= t.area_precision_min;
}

namespace detail {

enum class GroupVerdict { not_viable, multiline, accepted };

inline GroupVerdict judge_one_to_many(const GtInstance& g, std::span<const DetInstance> dets,
                                      const Thresholds& t) {
  if (dets.size() < 2) throw ContractError("one-to-many match needs at least two detections");
  std::vector<Quad> quads;
  for (const DetInstance& d : dets) {
    if (area_precision(g, d) < t.area_precision_min) return GroupVerdict::not_viable;
    quads.push_back(d.quad);
  }
  if (covered_area(g.quad, quads) / area(g.quad) < t.area_recall_min) {
    return GroupVerdict::not_viable;
  }
  return is_multiline(quads, t.multiline_angle_min) ? GroupVerdict::multiline
                                                    : GroupVerdict::accepted;
}

inline GroupVerdict judge_many_to_one(std::span<const GtInstance> gts, const DetInstance& d,
                                      const Thresholds& t) {
  if (gts.size() < 2) throw ContractError("many-to-one match needs at least two GTs");
  std::vector<Quad> quads;
  for (const GtInstance& g : gts) {
    if (area_recall(g, d) < t.area_recall_min) return GroupVerdict::not_viable;
    quads.push_back(g.quad);
  }
  if (covered_area(d.quad, quads) / area(d.quad) < t.area_precision_min) {
    return GroupVerdict::not_viable;
  }
  return is_multiline(quads, t.multiline_angle_min) ? GroupVerdict::multiline
                                                    : GroupVerdict::accepted;
}

}  // namespace detail

// One GT covered by several detections: each detection lies mostly inside
// the GT, together they cover enough of it, and they sit on one text line.
inline bool match_one_to_many(const GtInstance& g, std::span<const DetInstance> dets,
                              const Thresholds& t) {
  return detail::judge_one_to_many(g, dets, t) == detail::GroupVerdict::accepted;
}

// Several GTs covered by one detection: each GT is mostly inside the
// detection, together they fill enough of it, and they sit on one text line.
inline bool match_many_to_one(std::span<const GtInstance> gts, const DetInstance& d,
                              const Thresholds& t) {
  return detail::judge_many_to_one(gts, d, t) == detail::GroupVerdict::accepted;
}

// Groups are the full candidate sets: for a GT, every usable detection whose
// area precision clears the threshold; for a detection, every GT whose area
// recall does. Detections that fall mostly inside a don't-care GT are
// excluded from all matching.
inline MatchMatrix build_match_matrix(const Sample& sample, const Thresholds& t) {
  t.validate();
  const std::size_t G = sample.gts.size();
  const std::size_t D = sample.dets.size();
  MatchMatrix m(G, D);

  std::vector<double> recall(G * D);
  std::vector<double> precision(G * D);
  for (std::size_t i = 0; i < G; ++i) {
    const double gt_area = area(sample.gts[i].quad);
    for (std::size_t j = 0; j < D; ++j) {
      const double inter = intersect_area(sample.gts[i].quad, sample.dets[j].quad);
      recall[i * D + j] = inter / gt_area;
      precision[i * D + j] = inter / area(sample.dets[j].quad);
    }
  }

  for (std::size_t i = 0; i < G; ++i) {
    if (!sample.gts[i].dont_care) continue;
    m.mark_dont_care(i);
    for (std::size_t j = 0; j < D; ++j) {
      if (precision[i * D + j] >= t.area_precision_min) m.mark_excluded(j);
    }
  }
  const auto usable_gt = [&](std::size_t i) { return !m.gt_dont_care(i); };
  const auto usable_det = [&](std::size_t j) { return !m.det_excluded(j); };

  for (std::size_t i = 0; i < G; ++i) {
    if (!usable_gt(i)) continue;
    for (std::size_t j = 0; j < D; ++j) {
      if (!usable_det(j)) continue;
      if (recall[i * D + j] >= t.area_recall_min && precision[i * D + j] >= t.area_precision_min) {
        m.set(i, j);
        m.matches.push_back({MatchKind::one_to_one, {i}, {j}});
      }
    }
  }

  for (std::size_t i = 0; i < G; ++i) {
    if (!usable_gt(i)) continue;
    std::vector<std::size_t> group;
    std::vector<DetInstance> members;
    for (std::size_t j = 0; j < D; ++j) {
      if (usable_det(j) && precision[i * D + j] >= t.area_precision_min) {
        group.push_back(j);
        members.push_back(sample.dets[j]);
      }
    }
    if (group.size() < 2) continue;
    switch (detail::judge_one_to_many(sample.gts[i], members, t)) {
      case detail::GroupVerdict::accepted:
        for (std::size_t j : group) m.set(i, j);
        m.matches.push_back({MatchKind::one_to_many, {i}, group});
        break;
      case detail::GroupVerdict::multiline:
        m.multiline_rejections.push_back({MatchKind::one_to_many, {i}, group});
        break;
      case detail::GroupVerdict::not_viable:
        break;
    }
  }

  for (std::size_t j = 0; j < D; ++j) {
    if (!usable_det(j)) continue;
    std::vector<std::size_t> group;
    std::vector<GtInstance> members;
    for (std::size_t i = 0; i < G; ++i) {
      if (usable_gt(i) && recall[i * D + j] >= t.area_recall_min) {
        group.push_back(i);
        members.push_back(sample.gts[i]);
      }
    }
    if (group.size() < 2) continue;
    switch (detail::judge_many_to_one(members, sample.dets[j], t)) {
      case detail::GroupVerdict::accepted:
        for (std::size_t i : group) m.set(i, j);
        m.matches.push_back({MatchKind::many_to_one, group, {j}});
        break;
      case detail::GroupVerdict::multiline:
        m.multiline_rejections.push_back({MatchKind::many_to_one, group, {j}});
        break;
      case detail::GroupVerdict::not_viable:
        break;
    }
  }
  return m;
}

}  // namespace tedeval
