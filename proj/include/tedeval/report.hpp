#pragma once

// Structured JSON report. Field order is fixed so identical evaluations
// serialize to identical bytes.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tedeval/evaluation.hpp"
#include "tedeval/version.hpp"

namespace tedeval {

inline constexpr int kReportSchemaVersion = 1;

enum class Metric { tedeval, iou };

inline std::string_view to_string(Metric m) { return m == Metric::tedeval ? "tedeval" : "iou"; }

inline std::optional<Metric> parse_metric(std::string_view name) {
  if (name == "tedeval") return Metric::tedeval;
  if (name == "iou") return Metric::iou;
  return std::nullopt;
}

struct SampleReport {
  std::string id;
  ScoreSums sums;
  double recall = 0.0;
  double precision = 0.0;
  double hmean = 0.0;
  std::vector<std::optional<double>> per_gt_recall;
  std::vector<std::optional<double>> per_det_precision;
  std::vector<Match> matches;
  std::vector<Match> multiline_rejections;
  std::vector<std::size_t> non_convex_gts;
  std::vector<std::size_t> non_convex_dets;
};

struct EvalReport {
  int schema_version = kReportSchemaVersion;
  std::string tool_version{kToolVersion};
  Metric metric = Metric::tedeval;
  Thresholds thresholds;
  double iou_threshold = kIouThreshold;
  DatasetScore dataset;
  std::vector<SampleReport> samples;
  std::optional<FactorCounts> factors;
};

namespace detail {

inline void flag_non_convex(const Sample& s, SampleReport& r) {
  for (std::size_t i = 0; i < s.gts.size(); ++i) {
    if (!is_convex(s.gts[i].quad)) r.non_convex_gts.push_back(i);
  }
  for (std::size_t j = 0; j < s.dets.size(); ++j) {
    if (!is_convex(s.dets[j].quad)) r.non_convex_dets.push_back(j);
  }
}

}  // namespace detail

inline EvalReport make_tedeval_report(std::span<const Sample> samples,
                                      std::span<const SampleEvaluation> evals,
                                      const Thresholds& t) {
  EvalReport report;
  report.metric = Metric::tedeval;
  report.thresholds = t;
  std::vector<SampleScore> scores;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const SampleEvaluation& e = evals[s];
    SampleReport r;
    r.id = samples[s].id;
    r.sums = e.score.sums;
    r.recall = e.score.recall;
    r.precision = e.score.precision;
    r.hmean = e.score.hmean;
    r.per_gt_recall = e.score.per_gt_recall;
    r.per_det_precision = e.score.per_det_precision;
    r.matches = e.matrix.matches;
    r.multiline_rejections = e.matrix.multiline_rejections;
    detail::flag_non_convex(samples[s], r);
    report.samples.push_back(std::move(r));
    scores.push_back(e.score);
  }
  report.dataset = aggregate_dataset(std::span<const SampleScore>(scores));
  report.factors = count_factors(samples, evals);
  return report;
}

inline EvalReport make_iou_report(std::span<const Sample> samples,
                                  std::span<const IouResult> results, const Thresholds& t,
                                  double iou_threshold) {
  EvalReport report;
  report.metric = Metric::iou;
  report.thresholds = t;
  report.iou_threshold = iou_threshold;
  std::vector<ScoreSums> sums;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const IouResult& res = results[s];
    SampleReport r;
    r.id = samples[s].id;
    r.sums = res.sums;
    r.recall = res.recall;
    r.precision = res.precision;
    r.hmean = res.hmean;
    r.per_gt_recall.resize(samples[s].gts.size());
    r.per_det_precision.resize(samples[s].dets.size());
    for (std::size_t i = 0; i < r.per_gt_recall.size(); ++i) {
      if (!res.gt_dont_care[i]) r.per_gt_recall[i] = 0.0;
    }
    for (std::size_t j = 0; j < r.per_det_precision.size(); ++j) {
      if (!res.det_excluded[j]) r.per_det_precision[j] = 0.0;
    }
    for (const auto& [i, j] : res.matched_pairs) {
      r.per_gt_recall[i] = 1.0;
      r.per_det_precision[j] = 1.0;
      r.matches.push_back({MatchKind::one_to_one, {i}, {j}});
    }
    detail::flag_non_convex(samples[s], r);
    report.samples.push_back(std::move(r));
    sums.push_back(res.sums);
  }
  report.dataset = aggregate_dataset(std::span<const ScoreSums>(sums));
  return report;
}

namespace detail {

inline nlohmann::ordered_json optional_list(const std::vector<std::optional<double>>& v) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& x : v) {
    if (x) out.push_back(*x);
    else out.push_back(nullptr);
  }
  return out;
}

inline std::vector<std::optional<double>> optional_list_from(const nlohmann::ordered_json& j) {
  std::vector<std::optional<double>> out;
  for (const auto& x : j) {
    if (x.is_null()) out.emplace_back();
    else out.emplace_back(x.get<double>());
  }
  return out;
}

inline nlohmann::ordered_json match_list(const std::vector<Match>& matches) {
  auto out = nlohmann::ordered_json::array();
  for (const Match& m : matches) {
    nlohmann::ordered_json e;
    e["kind"] = std::string(to_string(m.kind));
    e["gts"] = m.gts;
    e["dets"] = m.dets;
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<Match> match_list_from(const nlohmann::ordered_json& j) {
  std::vector<Match> out;
  for (const auto& e : j) {
    Match m;
    const auto kind = e.at("kind").get<std::string>();
    if (kind == "one_to_one") m.kind = MatchKind::one_to_one;
    else if (kind == "one_to_many") m.kind = MatchKind::one_to_many;
    else if (kind == "many_to_one") m.kind = MatchKind::many_to_one;
    else throw ParseError("report: unknown match kind '" + kind + "'");
    m.gts = e.at("gts").get<std::vector<std::size_t>>();
    m.dets = e.at("dets").get<std::vector<std::size_t>>();
    out.push_back(std::move(m));
  }
  return out;
}

inline nlohmann::ordered_json sums_json(const ScoreSums& s) {
  nlohmann::ordered_json j;
  j["recall_sum"] = s.recall_sum;
  j["num_gt"] = s.num_gt;
  j["precision_sum"] = s.precision_sum;
  j["num_det"] = s.num_det;
  return j;
}

inline ScoreSums sums_from(const nlohmann::ordered_json& j) {
  return {j.at("recall_sum").get<double>(), j.at("num_gt").get<std::size_t>(),
          j.at("precision_sum").get<double>(), j.at("num_det").get<std::size_t>()};
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema_version"] = r.schema_version;
  j["tool_version"] = r.tool_version;
  j["metric"] = std::string(to_string(r.metric));
  ordered_json t;
  t["area_recall_min"] = r.thresholds.area_recall_min;
  t["area_precision_min"] = r.thresholds.area_precision_min;
  t["multiline_angle_min"] = r.thresholds.multiline_angle_min;
  t["iou_threshold"] = r.iou_threshold;
  j["thresholds"] = std::move(t);

  ordered_json d;
  d["recall"] = r.dataset.recall;
  d["precision"] = r.dataset.precision;
  d["hmean"] = r.dataset.hmean;
  d["totals"] = detail::sums_json(r.dataset.sums);
  j["dataset"] = std::move(d);

  if (r.factors) {
    const FactorCounts& f = *r.factors;
    ordered_json fj;
    fj["granularity"] = f.granularity;
    fj["completeness"] = f.completeness;
    fj["multiline_rejections"] = f.multiline_rejections;
    fj["multiline_detections"] = f.multiline_detections;
    fj["successful_detections"] = f.successful_detections;
    fj["reference_detections"] = f.reference_detections;
    ordered_json pj;
    pj["granularity"] = f.granularity_proportion();
    pj["completeness"] = f.completeness_proportion();
    pj["multiline"] = f.multiline_proportion();
    fj["proportions"] = std::move(pj);
    j["factors"] = std::move(fj);
  } else {
    j["factors"] = nullptr;
  }

  auto samples = ordered_json::array();
  for (const SampleReport& s : r.samples) {
    ordered_json sj;
    sj["id"] = s.id;
    sj["recall"] = s.recall;
    sj["precision"] = s.precision;
    sj["hmean"] = s.hmean;
    sj["totals"] = detail::sums_json(s.sums);
    sj["per_gt_recall"] = detail::optional_list(s.per_gt_recall);
    sj["per_det_precision"] = detail::optional_list(s.per_det_precision);
    sj["matches"] = detail::match_list(s.matches);
    sj["multiline_rejections"] = detail::match_list(s.multiline_rejections);
    sj["non_convex_gts"] = s.non_convex_gts;
    sj["non_convex_dets"] = s.non_convex_dets;
    samples.push_back(std::move(sj));
  }
  j["samples"] = std::move(samples);
  return j;
}

inline EvalReport report_from_json(const nlohmann::ordered_json& j) {
  try {
    EvalReport r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) {
      throw ParseError("report: unsupported schema version " + std::to_string(r.schema_version));
    }
    r.tool_version = j.at("tool_version").get<std::string>();
    const auto metric = parse_metric(j.at("metric").get<std::string>());
    if (!metric) throw ParseError("report: unknown metric");
    r.metric = *metric;
    const auto& t = j.at("thresholds");
    r.thresholds.area_recall_min = t.at("area_recall_min").get<double>();
    r.thresholds.area_precision_min = t.at("area_precision_min").get<double>();
    r.thresholds.multiline_angle_min = t.at("multiline_angle_min").get<double>();
    r.iou_threshold = t.at("iou_threshold").get<double>();

    const auto& d = j.at("dataset");
    r.dataset.recall = d.at("recall").get<double>();
    r.dataset.precision = d.at("precision").get<double>();
    r.dataset.hmean = d.at("hmean").get<double>();
    r.dataset.sums = detail::sums_from(d.at("totals"));

    if (const auto& f = j.at("factors"); !f.is_null()) {
      FactorCounts c;
      c.granularity = f.at("granularity").get<std::size_t>();
      c.completeness = f.at("completeness").get<std::size_t>();
      c.multiline_rejections = f.at("multiline_rejections").get<std::size_t>();
      c.multiline_detections = f.at("multiline_detections").get<std::size_t>();
      c.successful_detections = f.at("successful_detections").get<std::size_t>();
      c.reference_detections = f.at("reference_detections").get<std::size_t>();
      r.factors = c;
    }

    for (const auto& sj : j.at("samples")) {
      SampleReport s;
      s.id = sj.at("id").get<std::string>();
      s.recall = sj.at("recall").get<double>();
      s.precision = sj.at("precision").get<double>();
      s.hmean = sj.at("hmean").get<double>();
      s.sums = detail::sums_from(sj.at("totals"));
      s.per_gt_recall = detail::optional_list_from(sj.at("per_gt_recall"));
      s.per_det_precision = detail::optional_list_from(sj.at("per_det_precision"));
      s.matches = detail::match_list_from(sj.at("matches"));
      s.multiline_rejections = detail::match_list_from(sj.at("multiline_rejections"));
      s.non_convex_gts = sj.at("non_convex_gts").get<std::vector<std::size_t>>();
      s.non_convex_dets = sj.at("non_convex_dets").get<std::vector<std::size_t>>();
      r.samples.push_back(std::move(s));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
}

inline std::string report_to_string(const EvalReport& r) { return to_json(r).dump(2) + "\n"; }

inline EvalReport parse_report(std::string_view text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
  return report_from_json(j);
}

inline void render_report(const EvalReport& r, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write report " + path.string());
  out << report_to_string(r);
  if (!out) throw IoError("failed writing report " + path.string());
}

}  // namespace tedeval
