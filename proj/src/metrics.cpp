#include "probebench/metrics.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <tuple>

#include "probebench/errors.hpp"

namespace probebench::metrics {

std::vector<std::uint32_t> RunMetrics::empty_groups() const {
  std::vector<std::uint32_t> out;
  for (std::size_t g = 0; g < per_group_counts.size(); ++g) {
    if (per_group_counts[g] == 0) out.push_back(static_cast<std::uint32_t>(g));
  }
  return out;
}

RunMetrics group_metrics(std::span<const std::uint32_t> preds, std::span<const std::uint32_t> labels,
                         std::span<const std::uint32_t> groups, std::uint32_t group_count) {
  if (preds.size() != labels.size() || preds.size() != groups.size()) {
    throw MetricsError(fmt::format("length mismatch: {} predictions, {} labels, {} groups", preds.size(),
                                   labels.size(), groups.size()));
  }
  if (preds.empty()) throw MetricsError("no examples to evaluate");
  if (group_count == 0) throw MetricsError("group_count must be >= 1");

  std::vector<std::uint64_t> correct(group_count, 0);
  RunMetrics m;
  m.per_group_counts.assign(group_count, 0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const std::uint32_t g = groups[i];
    if (g >= group_count) throw MetricsError(fmt::format("example {}: group {} >= group_count {}", i, g, group_count));
    ++m.per_group_counts[g];
    if (preds[i] == labels[i]) ++correct[g];
  }

  m.per_group_acc.assign(group_count, 0.0);
  std::uint64_t total_correct = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (std::uint32_t g = 0; g < group_count; ++g) {
    total_correct += correct[g];
    if (m.per_group_counts[g] == 0) continue;
    m.per_group_acc[g] = static_cast<double>(correct[g]) / static_cast<double>(m.per_group_counts[g]);
    worst = std::min(worst, m.per_group_acc[g]);
  }
  m.wga = worst;
  m.oa = static_cast<double>(total_correct) / static_cast<double>(preds.size());
  return m;
}

namespace {

std::pair<double, double> mean_and_sample_std(std::span<const RunMetrics> runs, double RunMetrics::*field) {
  const double n = static_cast<double>(runs.size());
  double mean = 0.0;
  for (const auto& r : runs) mean += r.*field;
  mean /= n;
  if (runs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (const auto& r : runs) ss += (r.*field - mean) * (r.*field - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

}  // namespace

AggregateMetrics aggregate(std::span<const RunMetrics> runs) {
  if (runs.empty()) throw MetricsError("aggregate: no runs");
  for (const auto& r : runs) {
    if (r.per_group_counts.size() != runs.front().per_group_counts.size()) {
      throw MetricsError("aggregate: runs disagree on group_count");
    }
  }
  AggregateMetrics a;
  std::tie(a.mean_wga, a.std_wga) = mean_and_sample_std(runs, &RunMetrics::wga);
  std::tie(a.mean_oa, a.std_oa) = mean_and_sample_std(runs, &RunMetrics::oa);
  a.repeat_count = runs.size();
  return a;
}

std::size_t select_best(std::span<const Candidate> cells) {
  if (cells.empty()) throw MetricsError("select_best: no cells");
  auto better = [](const Candidate& a, const Candidate& b) {
    if (a.validation.mean_wga != b.validation.mean_wga) return a.validation.mean_wga > b.validation.mean_wga;
    if (a.validation.mean_oa != b.validation.mean_oa) return a.validation.mean_oa > b.validation.mean_oa;
    if (a.lr != b.lr) return a.lr < b.lr;
    return a.wd < b.wd;
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < cells.size(); ++i) {
    if (better(cells[i], cells[best])) best = i;
  }
  return best;
}

}  // namespace probebench::metrics
