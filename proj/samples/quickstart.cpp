// Scores a hand-built scene with both metrics, then a dataset on disk if a
// gt/det pair of directories is given.
//
//   quickstart [gt_dir det_dir]

#include <cstdio>
#include <iostream>
#include <vector>

#include "tedeval/tedeval.hpp"

using namespace tedeval;

static Quad box(double x0, double y0, double x1, double y1) {
  return Quad{{Point{x0, y0}, Point{x1, y0}, Point{x1, y1}, Point{x0, y1}}};
}

static void print(const char* label, double r, double p, double h) {
  std::printf("%-28s R=%.4f P=%.4f H=%.4f\n", label, r, p, h);
}

int main(int argc, char** argv) {
  // Two words on one line, detected as a single box.
  Sample s;
  s.id = "line";
  s.gts.push_back(parse_gt_line("10,10,90,10,90,30,10,30,HELLO", Format::icdar15));
  s.gts.push_back(parse_gt_line("100,10,180,10,180,30,100,30,WORLD", Format::icdar15));
  s.dets.push_back(DetInstance{box(10, 10, 180, 30), 0.9});

  const SampleEvaluation ted = evaluate_sample(s, Thresholds{});
  print("character-level (merged):", ted.score.recall, ted.score.precision, ted.score.hmean);
  const IouResult iou = iou_evaluate(s);
  print("IoU baseline (merged):", iou.recall, iou.precision, iou.hmean);

  for (const Match& m : ted.matrix.matches) {
    std::cout << "  " << to_string(m.kind) << ": " << m.gts.size() << " GT(s), " << m.dets.size()
              << " detection(s)\n";
  }

  if (argc == 3) {
    const Dataset data = load_dataset(argv[1], argv[2], Format::icdar15);
    const auto evals = evaluate_tedeval(data.samples, Thresholds{}, default_jobs());
    const EvalReport report = make_tedeval_report(data.samples, evals, Thresholds{});
    for (const SampleReport& r : report.samples) print(r.id.c_str(), r.recall, r.precision, r.hmean);
    print("dataset:", report.dataset.recall, report.dataset.precision, report.dataset.hmean);
  }
  return 0;
}
