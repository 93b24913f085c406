#include <gtest/gtest.h>

#include <random>
#include <set>

#include "test_support.hpp"

namespace tedeval {
namespace {

using test::det;
using test::gt;
using test::gt_len;
using test::rect;
using test::scene;

TEST(Iou, Fixtures) {
  EXPECT_DOUBLE_EQ(iou(rect(0, 0, 10, 2), rect(0, 0, 10, 2)), 1.0);
  EXPECT_DOUBLE_EQ(iou(rect(0, 0, 10, 2), rect(20, 0, 30, 2)), 0.0);
  // Intersection 10, union 30.
  EXPECT_NEAR(iou(rect(0, 0, 10, 2), rect(5, 0, 15, 2)), 10.0 / 30.0, 1e-12);
}

TEST(Iou, SymmetricAndBounded) {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 300; ++n) {
    const Quad a = test::random_convex_quad(rng);
    const Quad b = test::random_convex_quad(rng);
    const double ab = iou(a, b);
    EXPECT_NEAR(ab, iou(b, a), 1e-12);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
  }
}

TEST(IouEvaluate, Perfect) {
  const Sample s = scene({gt_len(rect(0, 0, 10, 2), 5), gt_len(rect(0, 5, 10, 7), 5)},
                         {det(rect(0, 0, 10, 2)), det(rect(0, 5, 10, 7))});
  const IouResult r = iou_evaluate(s);
  EXPECT_DOUBLE_EQ(r.recall, 1.0);
  EXPECT_DOUBLE_EQ(r.precision, 1.0);
  EXPECT_DOUBLE_EQ(r.hmean, 1.0);
  EXPECT_EQ(r.matched_pairs.size(), 2u);
}

TEST(IouEvaluate, LineLevelDetectionMatchesNothing) {
  // Two words with a gap, one box over the whole line: IoU 20/44 each.
  const Sample s = scene({gt_len(rect(0, 0, 10, 2), 5), gt_len(rect(12, 0, 22, 2), 5)},
                         {det(rect(0, 0, 22, 2))});
  const IouResult r = iou_evaluate(s);
  EXPECT_TRUE(r.matched_pairs.empty());
  EXPECT_DOUBLE_EQ(r.hmean, 0.0);
  const SampleScore ted = test::evaluate(s).score;
  EXPECT_DOUBLE_EQ(ted.recall, 1.0);
  EXPECT_DOUBLE_EQ(ted.precision, 1.0);
}

TEST(IouEvaluate, ThreeWaySplitMatchesNothing) {
  const Sample s = scene({gt_len(rect(0, 0, 12, 2), 6)},
                         {det(rect(0, 0, 4, 2)), det(rect(4, 0, 8, 2)), det(rect(8, 0, 12, 2))});
  const IouResult r = iou_evaluate(s);
  EXPECT_TRUE(r.matched_pairs.empty());
  EXPECT_DOUBLE_EQ(r.recall, 0.0);
  EXPECT_DOUBLE_EQ(r.precision, 0.0);
  const SampleScore ted = test::evaluate(s).score;
  EXPECT_DOUBLE_EQ(ted.recall, 1.0);
  EXPECT_NEAR(ted.precision, 1.0 / 3.0, 1e-15);
}

TEST(IouEvaluate, GreedyTakesHighestFirst) {
  // Detection 1 equals GT 1 and is taken first; detection 0 overlaps both GTs
  // at 9/11 and is left with GT 0.
  const Sample s = scene({gt_len(rect(0, 0, 10, 10), 3), gt_len(rect(2, 0, 12, 10), 3)},
                         {det(rect(1, 0, 11, 10)), det(rect(2, 0, 12, 10))});
  const IouResult r = iou_evaluate(s);
  const std::vector<std::pair<std::size_t, std::size_t>> want{{0, 0}, {1, 1}};
  EXPECT_EQ(r.matched_pairs, want);
}

TEST(IouEvaluate, DontCareExclusion) {
  const Sample s = scene({gt_len(rect(0, 0, 10, 2), 5), gt(rect(0, 10, 10, 12), "###")},
                         {det(rect(0, 0, 10, 2)), det(rect(0, 10, 10, 12))});
  const IouResult r = iou_evaluate(s);
  EXPECT_TRUE(r.gt_dont_care[1]);
  EXPECT_TRUE(r.det_excluded[1]);
  EXPECT_EQ(r.sums.num_gt, 1u);
  EXPECT_EQ(r.sums.num_det, 1u);
  EXPECT_DOUBLE_EQ(r.hmean, 1.0);
}

TEST(IouEvaluate, EmptyConventions) {
  EXPECT_DOUBLE_EQ(iou_evaluate(scene({}, {})).hmean, 1.0);
  const IouResult no_dets = iou_evaluate(scene({gt_len(rect(0, 0, 4, 2), 2)}, {}));
  EXPECT_DOUBLE_EQ(no_dets.recall, 0.0);
  EXPECT_DOUBLE_EQ(no_dets.precision, 0.0);
}

TEST(IouProperty, MatchingIsOneToOne) {
  std::mt19937_64 rng(17);
  for (int n = 0; n < 200; ++n) {
    const Sample s = test::random_line_scene(rng);
    const IouResult r = iou_evaluate(s);
    std::set<std::size_t> gts;
    std::set<std::size_t> dets;
    for (const auto& [i, j] : r.matched_pairs) {
      EXPECT_TRUE(gts.insert(i).second);
      EXPECT_TRUE(dets.insert(j).second);
      EXPECT_GE(iou(s.gts[i].quad, s.dets[j].quad), kIouThreshold);
    }
  }
}

TEST(IouProperty, CharacterLevelNotBelowIouOnSplitsAndMerges) {
  std::vector<Sample> fixtures;
  for (std::size_t n : {2u, 3u, 4u}) {
    std::vector<DetInstance> pieces;
    const double w = 24.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      pieces.push_back(det(rect(w * static_cast<double>(k), 0, w * static_cast<double>(k + 1), 4)));
    }
    fixtures.push_back(scene({gt_len(rect(0, 0, 24, 4), 12)}, pieces));
  }
  fixtures.push_back(scene({gt_len(rect(0, 0, 10, 2), 5), gt_len(rect(12, 0, 22, 2), 5)},
                           {det(rect(0, 0, 22, 2))}));
  fixtures.push_back(scene({gt_len(rect(0, 0, 10, 2), 5), gt_len(rect(12, 0, 22, 2), 5),
                            gt_len(rect(24, 0, 30, 2), 3)},
                           {det(rect(0, 0, 30, 2))}));
  for (const Sample& s : fixtures) {
    EXPECT_GE(test::evaluate(s).score.hmean, iou_evaluate(s).hmean);
  }
}

TEST(EvaluateIou, ParallelMatchesSerial) {
  std::mt19937_64 rng(2);
  std::vector<Sample> samples;
  for (int n = 0; n < 40; ++n) samples.push_back(test::random_line_scene(rng));
  const auto serial = evaluate_iou(samples, kIouThreshold, {}, 1);
  const auto parallel = evaluate_iou(samples, kIouThreshold, {}, 8);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    EXPECT_EQ(serial[s].matched_pairs, parallel[s].matched_pairs);
    EXPECT_EQ(serial[s].hmean, parallel[s].hmean);
  }
}

}  // namespace
}  // namespace tedeval
