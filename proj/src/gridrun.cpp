#include "probebench/gridrun.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <optional>
#include <thread>

#include "probebench/errors.hpp"
#include "probebench/rng.hpp"

namespace probebench::grid {

const char* to_string(Method method) noexcept { return method == Method::kSubg ? "subg" : "erm"; }

Method parse_method(const std::string& text) {
  if (text == "erm") return Method::kErm;
  if (text == "subg") return Method::kSubg;
  throw SpecError("method", "expected \"erm\" or \"subg\", got \"" + text + "\"");
}

void validate(const GridSpec& grid) {
  if (grid.lrs.empty()) throw SpecError("lrs", "must not be empty");
  if (grid.wds.empty()) throw SpecError("wds", "must not be empty");
  if (grid.seeds.empty()) throw SpecError("seeds", "must not be empty");
  for (double lr : grid.lrs) {
    if (!(lr > 0) || !std::isfinite(lr)) throw SpecError("lrs", fmt::format("{} is not a positive number", lr));
  }
  for (double wd : grid.wds) {
    if (!(wd >= 0) || !std::isfinite(wd)) throw SpecError("wds", fmt::format("{} is not a nonnegative number", wd));
  }
  if (grid.epochs < 1) throw SpecError("epochs", "must be >= 1");
  if (grid.batch_size < 1) throw SpecError("batch_size", "must be >= 1");
}

SplitView subsample_balanced(const SplitView& train_view, std::uint64_t seed) {
  if (train_view.empty()) throw TrainingError("subsample_balanced: training view is empty");
  std::map<std::uint32_t, std::vector<std::size_t>> by_group;
  for (std::size_t k = 0; k < train_view.size(); ++k) by_group[train_view.group(k)].push_back(train_view.indices()[k]);
  std::size_t m = train_view.size();
  for (const auto& [g, members] : by_group) m = std::min(m, members.size());

  std::vector<std::size_t> chosen;
  chosen.reserve(m * by_group.size());
  for (auto& [g, members] : by_group) {
    // Partial Fisher-Yates: the first m slots become a uniform m-subset.
    auto gen = rng::Xoshiro256::substream(seed, rng::Purpose::kSubsample, g);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(gen.below(members.size() - i));
      std::swap(members[i], members[j]);
    }
    chosen.insert(chosen.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(m));
  }
  std::sort(chosen.begin(), chosen.end());
  return SplitView(train_view.dataset(), train_view.split(), std::move(chosen));
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PROBE_BENCH_WORKERS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct Task {
  std::size_t cell;
  std::size_t seed_slot;
};

SeedRun run_one(const EmbeddingDataset& dataset, const SplitView& train, const SplitView& val, const SplitView& test,
                const GridSpec& grid, double lr, double wd, std::uint64_t seed) {
  probe::TrainConfig config;
  config.lr = lr;
  config.wd = wd;
  config.epochs = grid.epochs;
  config.batch_size = grid.batch_size;
  config.seed = seed;
  config.normalize = grid.normalize;

  std::optional<SplitView> subsampled;
  if (grid.method == Method::kSubg) subsampled = subsample_balanced(train, seed);
  const SplitView& train_used = subsampled ? *subsampled : train;

  const auto model = probe::train(train_used, config);
  auto evaluate = [&](const SplitView& view) {
    const auto preds = probe::predict(model, view, grid.normalize);
    std::vector<std::uint32_t> labels(view.size()), groups(view.size());
    for (std::size_t k = 0; k < view.size(); ++k) {
      labels[k] = view.label(k);
      groups[k] = view.group(k);
    }
    return metrics::group_metrics(preds, labels, groups, dataset.group_count());
  };
  SeedRun run;
  run.seed = seed;
  run.train_size = train_used.size();
  run.validation = evaluate(val);
  run.test = evaluate(test);
  return run;
}

}  // namespace

GridReport run_grid(const EmbeddingDataset& dataset, const GridSpec& grid, const RunOptions& options) {
  validate(grid);
  const SplitView train = split_view(dataset, Split::kTrain);
  const SplitView val = split_view(dataset, Split::kValidation);
  const SplitView test = split_view(dataset, Split::kTest);
  if (train.empty()) throw InvariantError("dataset has no training examples");
  if (val.empty()) throw InvariantError("dataset has no validation examples");
  if (test.empty()) throw InvariantError("dataset has no test examples");

  GridReport report;
  report.grid = grid;
  report.dataset_fingerprint = fingerprint(dataset);
  for (double lr : grid.lrs) {
    for (double wd : grid.wds) {
      CellReport cell;
      cell.cell = report.cells.size();
      cell.lr = lr;
      cell.wd = wd;
      cell.runs.resize(grid.seeds.size());
      report.cells.push_back(std::move(cell));
    }
  }

  std::vector<Task> tasks;
  for (std::size_t c = 0; c < report.cells.size(); ++c) {
    for (std::size_t s = 0; s < grid.seeds.size(); ++s) tasks.push_back({c, s});
  }
  std::vector<std::exception_ptr> failures(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      auto& cell = report.cells[tasks[t].cell];
      const std::uint64_t seed = grid.seeds[tasks[t].seed_slot];
      try {
        cell.runs[tasks[t].seed_slot] = run_one(dataset, train, val, test, grid, cell.lr, cell.wd, seed);
      } catch (...) {
        failures[t] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::min<std::size_t>(std::max(1u, options.workers), tasks.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (!failures[t]) continue;
    const auto& cell = report.cells[tasks[t].cell];
    const std::uint64_t seed = grid.seeds[tasks[t].seed_slot];
    try {
      std::rethrow_exception(failures[t]);
    } catch (const std::exception& e) {
      throw TrainingError(fmt::format("cell {} (lr={}, wd={}), seed {}: {}", cell.cell, cell.lr, cell.wd, seed, e.what()));
    }
  }

  std::vector<metrics::Candidate> candidates;
  for (auto& cell : report.cells) {
    std::vector<metrics::RunMetrics> val_runs, test_runs;
    for (const auto& r : cell.runs) {
      val_runs.push_back(r.validation);
      test_runs.push_back(r.test);
    }
    cell.validation = metrics::aggregate(val_runs);
    cell.test = metrics::aggregate(test_runs);
    candidates.push_back({cell.lr, cell.wd, cell.validation});
  }
  report.selected_cell = metrics::select_best(candidates);
  return report;
}

}  // namespace probebench::grid
