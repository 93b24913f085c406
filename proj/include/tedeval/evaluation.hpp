#pragma once

// Dataset-level driver: evaluates samples in parallel and counts how often
// granularity, completeness and multiline cases occur.

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "tedeval/annotation_io.hpp"
#include "tedeval/baseline.hpp"
#include "tedeval/matching.hpp"
#include "tedeval/scoring.hpp"

namespace tedeval {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
// thrown by any task is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

struct SampleEvaluation {
  MatchMatrix matrix;
  CharTally tally;
  SampleScore score;
};

inline SampleEvaluation evaluate_sample(const Sample& sample, const Thresholds& t) {
  SampleEvaluation out;
  out.matrix = build_match_matrix(sample, t);
  out.tally = char_tally(sample, out.matrix);
  out.score = score_sample(sample, out.matrix, out.tally);
  return out;
}

inline std::vector<SampleEvaluation> evaluate_tedeval(std::span<const Sample> samples,
                                                      const Thresholds& t, unsigned jobs = 1) {
  t.validate();
  std::vector<SampleEvaluation> out(samples.size());
  parallel_for(samples.size(), jobs, [&](std::size_t i) { out[i] = evaluate_sample(samples[i], t); });
  return out;
}

inline std::vector<IouResult> evaluate_iou(std::span<const Sample> samples, double threshold,
                                           const Thresholds& exclusion = {}, unsigned jobs = 1) {
  std::vector<IouResult> out(samples.size());
  parallel_for(samples.size(), jobs,
               [&](std::size_t i) { out[i] = iou_evaluate(samples[i], threshold, exclusion); });
  return out;
}

// Counted per detection. `reference_detections` is the base all proportions
// are taken against: successful detections plus detections whose only
// chance at a match was a group rejected as multiline.
struct FactorCounts {
  std::size_t granularity = 0;            // successful dets in a one-to-many / many-to-one match
  std::size_t completeness = 0;           // successful dets matched to a GT with some s != 1
  std::size_t multiline_rejections = 0;   // groups rejected by the angle test
  std::size_t multiline_detections = 0;   // distinct dets in those groups
  std::size_t successful_detections = 0;  // dets with nonzero precision
  std::size_t reference_detections = 0;

  double proportion(std::size_t count) const {
    return reference_detections == 0
               ? 0.0
               : static_cast<double>(count) / static_cast<double>(reference_detections);
  }
  double granularity_proportion() const { return proportion(granularity); }
  double completeness_proportion() const { return proportion(completeness); }
  double multiline_proportion() const { return proportion(multiline_detections); }

  FactorCounts& operator+=(const FactorCounts& o) {
    granularity += o.granularity;
    completeness += o.completeness;
    multiline_rejections += o.multiline_rejections;
    multiline_detections += o.multiline_detections;
    successful_detections += o.successful_detections;
    reference_detections += o.reference_detections;
    return *this;
  }

  friend bool operator==(const FactorCounts&, const FactorCounts&) = default;
};

inline FactorCounts count_sample_factors(const Sample& sample, const MatchMatrix& matrix,
                                         const CharTally& tally) {
  const std::size_t D = sample.dets.size();
  std::vector<bool> successful(D, false);
  std::vector<bool> in_many(D, false);
  std::vector<bool> in_rejected(D, false);
  for (std::size_t j = 0; j < D; ++j) {
    successful[j] = !matrix.det_excluded(j) && det_precision(j, tally, matrix) > 0.0;
  }
  for (const Match& m : matrix.matches) {
    if (m.kind == MatchKind::one_to_one) continue;
    for (std::size_t j : m.dets) in_many[j] = true;
  }
  for (const Match& m : matrix.multiline_rejections) {
    for (std::size_t j : m.dets) in_rejected[j] = true;
  }

  FactorCounts c;
  c.multiline_rejections = matrix.multiline_rejections.size();
  for (std::size_t j = 0; j < D; ++j) {
    if (in_rejected[j]) ++c.multiline_detections;
    if (successful[j] || in_rejected[j]) ++c.reference_detections;
    if (!successful[j]) continue;
    ++c.successful_detections;
    if (in_many[j]) ++c.granularity;
    for (std::size_t i : matrix.gts_of(j)) {
      const auto sums = tally.row_sums(i);
      if (std::any_of(sums.begin(), sums.end(), [](int s) { return s != 1; })) {
        ++c.completeness;
        break;
      }
    }
  }
  return c;
}

inline FactorCounts count_factors(std::span<const Sample> samples,
                                  std::span<const MatchMatrix> matrices,
                                  std::span<const CharTally> tallies) {
  if (samples.size() != matrices.size() || samples.size() != tallies.size()) {
    throw ContractError("count_factors: mismatched sample, matrix and tally counts");
  }
  FactorCounts total;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    total += count_sample_factors(samples[s], matrices[s], tallies[s]);
  }
  return total;
}

inline FactorCounts count_factors(std::span<const Sample> samples,
                                  std::span<const SampleEvaluation> evals) {
  if (samples.size() != evals.size()) {
    throw ContractError("count_factors: mismatched sample and evaluation counts");
  }
  FactorCounts total;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    total += count_sample_factors(samples[s], evals[s].matrix, evals[s].tally);
  }
  return total;
}

}  // namespace tedeval
