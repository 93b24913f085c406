#pragma once

// Command-line front end. Exit status: 0 on success, 1 on malformed
// annotations or violated contracts, 2 on a bad invocation (unknown flag,
// unreadable path, wrong --format).

#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tedeval/tedeval.hpp"

namespace tedeval::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

struct Options {
  std::string gt;
  std::string det;
  std::string format = "icdar15";
  std::string metric = "tedeval";
  Thresholds thresholds;
  double iou_threshold = kIouThreshold;
  std::string report;
  std::string overlay_dir;
  bool per_sample = false;
  unsigned jobs = default_jobs();
};

inline std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Scene text detection evaluation (character-level TedEval and IoU baseline)",
               "tedeval"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.add_option("--gt", opt.gt, "Ground-truth directory or zip archive")
      ->required()
      ->check(CLI::ExistingPath);
  app.add_option("--det", opt.det, "Detection directory or zip archive")
      ->required()
      ->check(CLI::ExistingPath);
  app.add_option("--format", opt.format, "Annotation format")
      ->check(CLI::IsMember({"icdar13", "icdar15"}))
      ->capture_default_str();
  app.add_option("--metric", opt.metric, "Metric to compute")
      ->check(CLI::IsMember({"tedeval", "iou"}))
      ->capture_default_str();
  app.add_option("--area-recall-min", opt.thresholds.area_recall_min,
                 "Area recall needed to match")
      ->capture_default_str();
  app.add_option("--area-precision-min", opt.thresholds.area_precision_min,
                 "Area precision needed to match")
      ->capture_default_str();
  app.add_option("--multiline-angle", opt.thresholds.multiline_angle_min,
                 "Angle (degrees) at which a many-match counts as multiline")
      ->capture_default_str();
  app.add_option("--iou-threshold", opt.iou_threshold, "IoU needed to match (iou metric)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--report", opt.report, "Write a JSON report to this path");
  app.add_option("--overlay-dir", opt.overlay_dir, "Write one SVG overlay per sample here");
  app.add_flag("--per-sample", opt.per_sample, "Print one score line per sample");
  app.add_option("--jobs", opt.jobs, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "tedeval: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    opt.thresholds.validate();
  } catch (const ContractError& e) {
    err << "tedeval: " << e.what() << "\n";
    return kExitUsage;
  }
  if (!opt.overlay_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(opt.overlay_dir, ec);
    if (ec) {
      err << "tedeval: --overlay-dir " << opt.overlay_dir << ": " << ec.message() << "\n";
      return kExitUsage;
    }
  }

  const Format format = *parse_format(opt.format);
  const Metric metric = *parse_metric(opt.metric);

  Dataset dataset;
  try {
    dataset = load_dataset(opt.gt, opt.det, format);
  } catch (const IoError& e) {
    err << "tedeval: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    const Format other = format == Format::icdar13 ? Format::icdar15 : Format::icdar13;
    bool other_fits = false;
    try {
      load_dataset(opt.gt, opt.det, other);
      other_fits = true;
    } catch (const Error&) {
    }
    if (other_fits) {
      err << "tedeval: --format " << to_string(format) << " does not match the input, which "
          << "parses as " << to_string(other) << " (" << e.what() << ")\n";
      return kExitUsage;
    }
    err << "tedeval: " << e.what() << "\n";
    return kExitData;
  }
  for (const auto& w : dataset.warnings) err << "tedeval: warning: " << w << "\n";
  if (dataset.samples.empty()) {
    err << "tedeval: no ground-truth files found in " << opt.gt << "\n";
    return kExitData;
  }

  try {
    const std::span<const Sample> samples(dataset.samples);
    std::vector<SampleEvaluation> evals;
    if (metric == Metric::tedeval || !opt.overlay_dir.empty()) {
      evals = evaluate_tedeval(samples, opt.thresholds, opt.jobs);
    }
    EvalReport report;
    if (metric == Metric::tedeval) {
      report = make_tedeval_report(samples, evals, opt.thresholds);
    } else {
      const auto results = evaluate_iou(samples, opt.iou_threshold, opt.thresholds, opt.jobs);
      report = make_iou_report(samples, results, opt.thresholds, opt.iou_threshold);
    }

    if (!opt.overlay_dir.empty()) {
      for (std::size_t s = 0; s < samples.size(); ++s) {
        render_overlay(samples[s], evals[s].matrix, evals[s].tally,
                       std::filesystem::path(opt.overlay_dir) / (samples[s].id + ".svg"));
      }
    }
    if (!opt.report.empty()) render_report(report, opt.report);

    if (opt.per_sample) {
      for (const SampleReport& s : report.samples) {
        out << s.id << " R=" << fixed4(s.recall) << " P=" << fixed4(s.precision)
            << " H=" << fixed4(s.hmean) << "\n";
      }
    }
    out << "metric: " << to_string(metric) << "\n";
    out << "samples: " << report.samples.size() << "  gt: " << report.dataset.sums.num_gt
        << "  det: " << report.dataset.sums.num_det << "\n";
    out << "recall: " << fixed4(report.dataset.recall)
        << "  precision: " << fixed4(report.dataset.precision)
        << "  hmean: " << fixed4(report.dataset.hmean) << "\n";
    if (report.factors) {
      const FactorCounts& f = *report.factors;
      out << "granularity: " << f.granularity << " (" << fixed4(f.granularity_proportion())
          << ")  completeness: " << f.completeness << " (" << fixed4(f.completeness_proportion())
          << ")  multiline: " << f.multiline_rejections << " rejected, "
          << f.multiline_detections << " detections (" << fixed4(f.multiline_proportion())
          << ")  successful: " << f.successful_detections << "\n";
    }
    out << "R=" << fixed4(report.dataset.recall) << " P=" << fixed4(report.dataset.precision)
        << " H=" << fixed4(report.dataset.hmean) << "\n";
  } catch (const IoError& e) {
    err << "tedeval: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "tedeval: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace tedeval::cli
