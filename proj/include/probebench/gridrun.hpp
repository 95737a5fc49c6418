#pragma once

// Hyperparameter grid over (lr, wd) with seed repeats. Every (cell, seed) run
// is an independent task over the shared read-only dataset; results land in
// fixed slots (lr-major, then wd, seeds in the listed order) so the report does
// not depend on the number of workers or on completion order.

#include <cstdint>
#include <string>
#include <vector>

#include "probebench/embstore.hpp"
#include "probebench/metrics.hpp"
#include "probebench/probe.hpp"

namespace probebench::grid {

enum class Method { kErm, kSubg };

const char* to_string(Method method) noexcept;
Method parse_method(const std::string& text);

struct GridSpec {
  std::vector<double> lrs = {0.01, 0.001, 0.0001};
  std::vector<double> wds = {1e-4, 1e-5, 1e-6};
  std::vector<std::uint64_t> seeds = {0, 100, 200};
  std::uint32_t epochs = 20;
  std::uint32_t batch_size = 32;
  Method method = Method::kErm;
  probe::Normalize normalize = probe::Normalize::kNone;
};

void validate(const GridSpec& grid);

struct SeedRun {
  std::uint64_t seed = 0;
  std::uint64_t train_size = 0;
  metrics::RunMetrics validation;
  metrics::RunMetrics test;
  friend bool operator==(const SeedRun&, const SeedRun&) = default;
};

struct CellReport {
  std::size_t cell = 0;
  double lr = 0.0;
  double wd = 0.0;
  std::vector<SeedRun> runs;
  metrics::AggregateMetrics validation;
  metrics::AggregateMetrics test;
  friend bool operator==(const CellReport&, const CellReport&) = default;
};

struct GridReport {
  GridSpec grid;
  std::string dataset_fingerprint;
  std::vector<CellReport> cells;
  std::size_t selected_cell = 0;

  const CellReport& selected() const { return cells.at(selected_cell); }
};

struct RunOptions {
  unsigned workers = 1;
};

// Group-balanced subsample: m examples from every nonempty group, m being the
// smallest nonempty group size, drawn without replacement. Indices stay sorted.
SplitView subsample_balanced(const SplitView& train_view, std::uint64_t seed);

GridReport run_grid(const EmbeddingDataset& dataset, const GridSpec& grid, const RunOptions& options = {});

// Number of workers: explicit value if nonzero, else $PROBE_BENCH_WORKERS, else
// the hardware concurrency (at least 1).
unsigned resolve_workers(unsigned requested);

}  // namespace probebench::grid
