#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

namespace tedeval {
namespace {

using test::det;
using test::gt;
using test::gt_len;
using test::rect;
using test::scene;

FactorCounts factors_of(const Sample& s) {
  const auto e = test::evaluate(s);
  return count_sample_factors(s, e.matrix, e.tally);
}

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

TEST(Factors, PerfectSceneHasNone) {
  const FactorCounts f = factors_of(scene({gt_len(rect(0, 0, 10, 2), 5)}, {det(rect(0, 0, 10, 2))}));
  EXPECT_EQ(f.granularity, 0u);
  EXPECT_EQ(f.completeness, 0u);
  EXPECT_EQ(f.multiline_rejections, 0u);
  EXPECT_EQ(f.successful_detections, 1u);
}

TEST(Factors, SplitCountsGranularity) {
  const FactorCounts f = factors_of(scene({gt_len(rect(0, 0, 12, 2), 6)},
                                          {det(rect(0, 0, 6, 2)), det(rect(6, 0, 12, 2))}));
  EXPECT_EQ(f.granularity, 2u);
  EXPECT_EQ(f.completeness, 0u);
  EXPECT_DOUBLE_EQ(f.granularity_proportion(), 1.0);
}

TEST(Factors, MissingCharactersCountCompleteness) {
  const FactorCounts f =
      factors_of(scene({gt_len(rect(0, 0, 10, 2), 10)}, {det(rect(0, 0, 7, 2))}));
  EXPECT_EQ(f.completeness, 1u);
  EXPECT_EQ(f.granularity, 0u);
}

TEST(Factors, StackedWordsCountMultiline) {
  const FactorCounts f = factors_of(scene(
      {gt_len(rect(0, 0, 20, 4), 5), gt_len(rect(0, 10, 20, 14), 5)}, {det(rect(0, 0, 20, 14))}));
  EXPECT_EQ(f.multiline_rejections, 1u);
  EXPECT_EQ(f.multiline_detections, 1u);
  EXPECT_EQ(f.successful_detections, 0u);
  EXPECT_DOUBLE_EQ(f.multiline_proportion(), 1.0);
}

TEST(Factors, ProportionsStayInUnitInterval) {
  std::mt19937_64 rng(13);
  FactorCounts total;
  for (int n = 0; n < 200; ++n) {
    const FactorCounts f = factors_of(test::random_line_scene(rng));
    for (double p : {f.granularity_proportion(), f.completeness_proportion(),
                     f.multiline_proportion()}) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, 1.0);
    }
    total += f;
  }
  EXPECT_GT(total.granularity, 0u);
  EXPECT_LE(total.granularity, total.successful_detections);
}

std::vector<Sample> random_dataset(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::vector<Sample> out;
  for (int k = 0; k < n; ++k) {
    Sample s = test::random_line_scene(rng);
    s.id = "img_" + std::to_string(k + 1);
    out.push_back(std::move(s));
  }
  return out;
}

EvalReport tedeval_report(const std::vector<Sample>& samples, unsigned jobs = 1) {
  const auto evals = evaluate_tedeval(samples, {}, jobs);
  return make_tedeval_report(samples, evals, {});
}

TEST(Report, ByteIdenticalAcrossRunsAndJobs) {
  const auto samples = random_dataset(31, 25);
  const std::string a = report_to_string(tedeval_report(samples, 1));
  EXPECT_EQ(a, report_to_string(tedeval_report(samples, 1)));
  EXPECT_EQ(a, report_to_string(tedeval_report(samples, 8)));
}

TEST(Report, RoundTripsThroughJson) {
  const auto samples = random_dataset(32, 10);
  const std::string text = report_to_string(tedeval_report(samples));
  const EvalReport back = parse_report(text);
  EXPECT_EQ(back.schema_version, kReportSchemaVersion);
  EXPECT_EQ(back.tool_version, kToolVersion);
  EXPECT_EQ(report_to_string(back), text);

  const auto results = evaluate_iou(samples, kIouThreshold);
  const std::string iou_text = report_to_string(make_iou_report(samples, results, {}, 0.5));
  const EvalReport iou_back = parse_report(iou_text);
  EXPECT_EQ(iou_back.metric, Metric::iou);
  EXPECT_FALSE(iou_back.factors.has_value());
  EXPECT_EQ(report_to_string(iou_back), iou_text);
}

TEST(Report, DatasetScoreFollowsFromSampleTotals) {
  const auto samples = random_dataset(33, 30);
  const EvalReport r = parse_report(report_to_string(tedeval_report(samples)));
  double recall_sum = 0, precision_sum = 0;
  std::size_t num_gt = 0, num_det = 0;
  for (const SampleReport& s : r.samples) {
    recall_sum += s.sums.recall_sum;
    precision_sum += s.sums.precision_sum;
    num_gt += s.sums.num_gt;
    num_det += s.sums.num_det;
    double per_gt = 0;
    for (const auto& v : s.per_gt_recall) per_gt += v.value_or(0.0);
    EXPECT_NEAR(per_gt, s.sums.recall_sum, 1e-9);
  }
  EXPECT_EQ(num_gt, r.dataset.sums.num_gt);
  EXPECT_EQ(num_det, r.dataset.sums.num_det);
  EXPECT_NEAR(recall_sum / static_cast<double>(num_gt), r.dataset.recall, 1e-12);
  EXPECT_NEAR(precision_sum / static_cast<double>(num_det), r.dataset.precision, 1e-12);
}

TEST(Report, RejectsBadInput) {
  EXPECT_THROW(parse_report("{"), ParseError);
  EXPECT_THROW(parse_report(R"({"schema_version": 99})"), ParseError);
  EXPECT_THROW(parse_report(R"({"schema_version": 1})"), ParseError);
}

TEST(Report, FlagsNonConvexQuads) {
  const Quad dart{{Point{0, 0}, Point{10, 0}, Point{3, 3}, Point{0, 10}}};
  const std::vector<Sample> samples{scene({gt_len(rect(0, 0, 10, 10), 3)}, {det(dart)})};
  const EvalReport r = tedeval_report(samples);
  EXPECT_TRUE(r.samples[0].non_convex_gts.empty());
  EXPECT_EQ(r.samples[0].non_convex_dets, std::vector<std::size_t>{0});
}

TEST(Overlay, EmptySceneGetsDefaultCanvas) {
  const Sample s = scene({}, {}, "empty");
  const auto e = test::evaluate(s);
  const std::string svg = overlay_svg(s, e.matrix, e.tally);
  EXPECT_NE(svg.find("width=\"100\" height=\"100\""), std::string::npos);
  EXPECT_EQ(count_of(svg, "<polygon"), 0u);
}

TEST(Overlay, OneDotPerCharacter) {
  const Sample s = scene({gt_len(rect(0, 0, 10, 2), 5), gt_len(rect(0, 5, 14, 7), 7)},
                         {det(rect(0, 0, 10, 2)), det(rect(0, 5, 14, 7))});
  const auto e = test::evaluate(s);
  const std::string svg = overlay_svg(s, e.matrix, e.tally);
  EXPECT_EQ(count_of(svg, "class=\"pcc\""), 12u);
  EXPECT_EQ(count_of(svg, "data-s=\"1\""), 12u);
  EXPECT_EQ(count_of(svg, "class=\"gt\""), 2u);
  EXPECT_EQ(count_of(svg, "class=\"det\""), 2u);
}

TEST(Overlay, DontCareAndExcludedAreDashed) {
  const Sample s = scene({gt(rect(0, 0, 10, 2), "###")}, {det(rect(0, 0, 10, 2))});
  const auto e = test::evaluate(s);
  const std::string svg = overlay_svg(s, e.matrix, e.tally);
  EXPECT_EQ(count_of(svg, "class=\"gt dont-care\""), 1u);
  EXPECT_EQ(count_of(svg, "class=\"det excluded\""), 1u);
  EXPECT_EQ(count_of(svg, "stroke-dasharray"), 2u);
  EXPECT_EQ(count_of(svg, "class=\"pcc\""), 0u);
}

}  // namespace
}  // namespace tedeval
