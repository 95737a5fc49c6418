#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace probebench::metrics {

// Accuracy of one evaluation split, broken down by group. Groups with zero
// examples have accuracy 0 and are excluded from the worst-group minimum.
struct RunMetrics {
  std::vector<double> per_group_acc;
  std::vector<std::uint64_t> per_group_counts;
  double wga = 0.0;
  double oa = 0.0;

  std::vector<std::uint32_t> empty_groups() const;
  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

struct AggregateMetrics {
  double mean_wga = 0.0;
  double std_wga = 0.0;
  double mean_oa = 0.0;
  double std_oa = 0.0;
  std::uint64_t repeat_count = 0;
  friend bool operator==(const AggregateMetrics&, const AggregateMetrics&) = default;
};

RunMetrics group_metrics(std::span<const std::uint32_t> preds, std::span<const std::uint32_t> labels,
                         std::span<const std::uint32_t> groups, std::uint32_t group_count);

// Mean and sample (n-1) standard deviation across repeats; std is 0 for one run.
AggregateMetrics aggregate(std::span<const RunMetrics> runs);

struct Candidate {
  double lr = 0.0;
  double wd = 0.0;
  AggregateMetrics validation;
};

// Index of the best candidate: highest mean validation WGA, then highest mean
// validation OA, then lowest lr, then lowest wd, then lowest index.
std::size_t select_best(std::span<const Candidate> cells);

}  // namespace probebench::metrics
