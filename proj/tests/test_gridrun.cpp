#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <set>

#include "probebench/errors.hpp"
#include "probebench/gridrun.hpp"
#include "probebench/json_io.hpp"
#include "probebench/synthgen.hpp"

using namespace probebench;
using grid::GridSpec;
using grid::Method;

namespace {

EmbeddingDataset small_waterbirds(std::uint64_t seed = 0) {
  synth::SynthSpec spec;
  spec.dim = 8;
  spec.core_snr = 1.0;
  spec.spur_snr = 3.0;
  spec.seed = seed;
  spec.train_counts = {350, 18, 6, 105};
  spec.val_counts = {47, 47, 13, 13};
  spec.test_counts = {60, 60, 20, 20};
  return synth::generate(spec);
}

std::array<std::size_t, 4> group_histogram(const SplitView& view) {
  std::array<std::size_t, 4> h{};
  for (std::size_t k = 0; k < view.size(); ++k) ++h[view.group(k)];
  return h;
}

}  // namespace

TEST_CASE("default grid matches the published protocol") {
  const GridSpec g;
  CHECK(g.lrs == std::vector<double>{0.01, 0.001, 0.0001});
  CHECK(g.wds == std::vector<double>{1e-4, 1e-5, 1e-6});
  CHECK(g.seeds == std::vector<std::uint64_t>{0, 100, 200});
  CHECK(g.epochs == 20);
  CHECK(g.batch_size == 32);
  CHECK(g.method == Method::kErm);
}

TEST_CASE("default grid runs 9 cells x 3 seeds in lr-major order") {
  const auto ds = small_waterbirds();
  const auto report = grid::run_grid(ds, GridSpec{}, {2});
  REQUIRE(report.cells.size() == 9);
  std::size_t runs = 0;
  for (std::size_t c = 0; c < 9; ++c) {
    const auto& cell = report.cells[c];
    CHECK(cell.cell == c);
    CHECK(cell.lr == GridSpec{}.lrs[c / 3]);
    CHECK(cell.wd == GridSpec{}.wds[c % 3]);
    REQUIRE(cell.runs.size() == 3);
    for (std::size_t s = 0; s < 3; ++s) {
      CHECK(cell.runs[s].seed == GridSpec{}.seeds[s]);
      CHECK(cell.runs[s].train_size == 479);
      ++runs;
    }
    CHECK(cell.validation.repeat_count == 3);
  }
  CHECK(runs == 27);

  std::vector<metrics::Candidate> candidates;
  for (const auto& c : report.cells) candidates.push_back({c.lr, c.wd, c.validation});
  CHECK(report.selected_cell == metrics::select_best(candidates));
  CHECK(report.dataset_fingerprint == fingerprint(ds));
}

TEST_CASE("single-cell grid") {
  const auto ds = small_waterbirds();
  GridSpec g;
  g.lrs = {0.01};
  g.wds = {1e-4};
  g.seeds = {7};
  const auto report = grid::run_grid(ds, g);
  REQUIRE(report.cells.size() == 1);
  CHECK(report.selected_cell == 0);
  CHECK(report.cells[0].test.std_wga == 0.0);
}

TEST_CASE("report is independent of the worker count") {
  const auto ds = small_waterbirds(3);
  GridSpec g;
  g.epochs = 3;
  const auto one = json_io::canonical(json_io::to_json(grid::run_grid(ds, g, {1})));
  const auto four = json_io::canonical(json_io::to_json(grid::run_grid(ds, g, {4})));
  const auto many = json_io::canonical(json_io::to_json(grid::run_grid(ds, g, {64})));
  CHECK(one == four);
  CHECK(one == many);
}

TEST_CASE("report JSON round-trips") {
  const auto ds = small_waterbirds();
  GridSpec g;
  g.lrs = {0.01, 0.001};
  g.wds = {0.0};
  g.seeds = {0, 1};
  g.epochs = 2;
  g.method = Method::kSubg;
  const auto report = grid::run_grid(ds, g);
  const auto j = json_io::to_json(report);
  const auto back = json_io::grid_report_from_json(j);
  CHECK(back.cells == report.cells);
  CHECK(back.selected_cell == report.selected_cell);
  CHECK(json_io::canonical(json_io::to_json(back)) == json_io::canonical(j));
  CHECK(j.at("method") == "subg");
}

TEST_CASE("subsample_balanced on the default training counts") {
  synth::SynthSpec spec;
  spec.dim = 2;
  const auto ds = synth::generate(spec);
  const auto train = split_view(ds, Split::kTrain);
  const auto sub = grid::subsample_balanced(train, 0);
  CHECK(sub.size() == 224);
  CHECK(group_histogram(sub) == std::array<std::size_t, 4>{56, 56, 56, 56});
  const std::set<std::size_t> all(train.indices().begin(), train.indices().end());
  for (auto i : sub.indices()) CHECK(all.contains(i));
  CHECK(std::is_sorted(sub.indices().begin(), sub.indices().end()));

  // Every example of the smallest group is kept.
  std::size_t minority_kept = 0;
  for (std::size_t k = 0; k < sub.size(); ++k) minority_kept += sub.group(k) == 1;
  CHECK(minority_kept == 56);

  const auto again = grid::subsample_balanced(train, 0);
  CHECK(std::equal(sub.indices().begin(), sub.indices().end(), again.indices().begin()));
  const auto other = grid::subsample_balanced(train, 100);
  CHECK_FALSE(std::equal(sub.indices().begin(), sub.indices().end(), other.indices().begin()));
}

TEST_CASE("subsample_balanced keeps already-balanced and singleton groups") {
  synth::SynthSpec spec;
  spec.dim = 2;
  spec.train_counts = {10, 10, 10, 10};
  const auto ds = synth::generate(spec);
  const auto train = split_view(ds, Split::kTrain);
  const auto sub = grid::subsample_balanced(train, 5);
  CHECK(std::equal(sub.indices().begin(), sub.indices().end(), train.indices().begin(), train.indices().end()));

  spec.train_counts = {10, 1, 4, 10};
  const auto ds2 = synth::generate(spec);
  const auto train2 = split_view(ds2, Split::kTrain);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = grid::subsample_balanced(train2, seed);
    CHECK(group_histogram(s) == std::array<std::size_t, 4>{1, 1, 1, 1});
    CHECK(std::find(s.indices().begin(), s.indices().end(), std::size_t{10}) != s.indices().end());
  }

  const EmbeddingDataset only_test(1, 2, 1, {1.f, 2.f}, {0, 1}, {0, 0}, {2, 2});
  CHECK_THROWS_AS(grid::subsample_balanced(split_view(only_test, Split::kTrain), 0), TrainingError);
}

TEST_CASE("subg only changes the training view") {
  const auto ds = small_waterbirds(9);
  GridSpec g;
  g.lrs = {0.01};
  g.wds = {1e-4};
  g.epochs = 5;
  const auto erm = grid::run_grid(ds, g);
  g.method = Method::kSubg;
  const auto subg = grid::run_grid(ds, g);
  for (std::size_t s = 0; s < 3; ++s) {
    CHECK(subg.cells[0].runs[s].train_size == 24);
    CHECK(erm.cells[0].runs[s].train_size == 479);
    CHECK(subg.cells[0].runs[s].validation.per_group_counts == erm.cells[0].runs[s].validation.per_group_counts);
    CHECK(subg.cells[0].runs[s].test.per_group_counts == erm.cells[0].runs[s].test.per_group_counts);
  }
}

TEST_CASE("strong core signal: selected test WGA near the oracle ceiling") {
  synth::SynthSpec spec;
  spec.dim = 64;
  spec.core_snr = 4.0;
  spec.spur_snr = 3.0;
  const auto ds = synth::generate(spec);
  const auto report = grid::run_grid(ds, GridSpec{}, {grid::resolve_workers(0)});
  const double oracle = synth::core_oracle_accuracy(spec);
  CHECK(oracle == doctest::Approx(0.99997).epsilon(1e-5));
  CHECK(report.selected().test.mean_wga <= oracle + 1e-9 + 0.01);
  CHECK(std::abs(report.selected().test.mean_wga - oracle) <= 0.03);
}

TEST_CASE("grid errors") {
  const EmbeddingDataset no_val(1, 2, 1, {1.f, 2.f, 3.f}, {0, 1, 0}, {0, 0, 0}, {0, 0, 2});
  CHECK_THROWS_AS(grid::run_grid(no_val, GridSpec{}), InvariantError);

  GridSpec g;
  g.lrs = {};
  CHECK_THROWS_AS(grid::validate(g), SpecError);
  g = GridSpec{};
  g.wds = {-1.0};
  CHECK_THROWS_AS(grid::validate(g), SpecError);

  // A diverging run surfaces with its cell and seed.
  const EmbeddingDataset huge(1, 2, 1, {3e38f, -3e38f, 1.f, -1.f, 1.f, -1.f}, {0, 1, 0, 1, 0, 1}, {0, 0, 0, 0, 0, 0},
                              {0, 0, 1, 1, 2, 2});
  g = GridSpec{};
  g.lrs = {1e300};
  g.wds = {0.0};
  g.seeds = {100};
  try {
    grid::run_grid(huge, g);
    FAIL("expected a training error");
  } catch (const TrainingError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("cell 0") != std::string::npos);
    CHECK(msg.find("seed 100") != std::string::npos);
  }
}

TEST_CASE("worker count resolution") {
  CHECK(grid::resolve_workers(3) == 3);
  ::setenv("PROBE_BENCH_WORKERS", "5", 1);
  CHECK(grid::resolve_workers(0) == 5);
  ::setenv("PROBE_BENCH_WORKERS", "junk", 1);
  CHECK(grid::resolve_workers(0) >= 1);
  ::unsetenv("PROBE_BENCH_WORKERS");
  CHECK(grid::resolve_workers(0) >= 1);
}

TEST_CASE("grid spec JSON") {
  const auto g = json_io::grid_spec_from_json(json_io::json::parse(R"({"lrs": [0.1], "seeds": [1, 2], "method": "subg"})"));
  CHECK(g.lrs == std::vector<double>{0.1});
  CHECK(g.wds == GridSpec{}.wds);
  CHECK(g.seeds == std::vector<std::uint64_t>{1, 2});
  CHECK(g.method == Method::kSubg);
  CHECK_THROWS_AS(json_io::grid_spec_from_json(json_io::json::parse(R"({"lr": [0.1]})")), SpecError);
  CHECK_THROWS_AS(json_io::grid_spec_from_json(json_io::json::parse(R"({"method": "dro"})")), SpecError);
  CHECK_THROWS_AS(json_io::grid_spec_from_json(json_io::json::parse(R"({"seeds": [-1]})")), SpecError);
  CHECK_THROWS_AS(json_io::grid_spec_from_json(json_io::json::parse(R"({"epochs": 0})")), SpecError);
}
