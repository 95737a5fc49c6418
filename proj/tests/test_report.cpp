#include <doctest.h>

#include <fstream>
#include <sstream>

#include "probebench/errors.hpp"
#include "probebench/json_io.hpp"
#include "probebench/report.hpp"

using namespace probebench;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) out.push_back(line);
  return out;
}

metrics::AggregateMetrics agg(double wga, double wga_sd, double oa, double oa_sd, std::uint64_t n = 3) {
  return {wga, wga_sd, oa, oa_sd, n};
}

// Hand-built two-cell report; no training involved.
grid::GridReport fixed_report() {
  grid::GridReport r;
  r.grid.lrs = {0.01, 0.001};
  r.grid.wds = {1e-05};
  r.dataset_fingerprint = "00000000deadbeef";
  r.cells.push_back({0, 0.01, 1e-05, {}, agg(0.75, 0.0125, 0.9, 0.001), agg(0.7, 0.02, 0.88, 0.003)});
  r.cells.push_back({1, 0.001, 1e-05, {}, agg(0.8123456, 0.0, 0.91, 0.0), agg(0.79, 0.01, 0.895, 0.002)});
  r.selected_cell = 1;
  return r;
}

std::string format_pair(const report::Reported& mean, const std::optional<report::Reported>& sd) {
  std::string s = report::format_reported(mean);
  if (sd) s += " ± " + report::format_reported(*sd);
  return s;
}

}  // namespace

TEST_CASE("reference constants match the checked-in transcription") {
  const auto rows = lines_of(read_text(PROBEBENCH_TEST_DATA "/reference_tables.csv"));
  const auto entries = report::reference_entries();
  REQUIRE(rows.size() == entries.size() + 1);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    const std::string built =
        e.source + "," + e.name + "," + e.pretraining + "," + format_pair(e.wga_mean, e.wga_std) + "," +
        format_pair(e.oa_mean, e.oa_std);
    CHECK(built == rows[k + 1]);
  }
}

TEST_CASE("scatter contains the reference points") {
  const auto text = report::emit_scatter({});
  const auto rows = lines_of(text);
  CHECK(rows.front() == "label,oa,wga,source");
  auto has = [&](const std::string& row) { return std::find(rows.begin(), rows.end(), row) != rows.end(); };
  CHECK(has("GroupDRO,91.8,89.2,Table 8"));
  CHECK(has("Ours-ViT-H-14,95.2,90.1,Table 8"));
  CHECK(has("ViT-H-14,95.21,90.13,Table 7"));
  CHECK(has("y=x,0.0,0.0,reference line oa = wga"));
  CHECK(rows.size() == 1 + report::reference_entries().size() + 2);
}

TEST_CASE("scatter adds one computed row per report") {
  const std::vector<std::pair<std::string, grid::GridReport>> reports = {{"synth-hi", fixed_report()}};
  const auto rows = lines_of(report::emit_scatter(reports));
  REQUIRE(rows.size() == 2 + report::reference_entries().size() + 2);
  CHECK(rows[1] == "synth-hi,89.5000,79.0000,computed: erm cell 1 test split mean of 3 seed(s)");
  CHECK(report::emit_scatter(reports) == report::emit_scatter(reports));
}

TEST_CASE("markdown table matches the golden file") {
  CHECK(report::emit_table(fixed_report(), report::Format::kMarkdown) ==
        read_text(PROBEBENCH_TEST_DATA "/table_golden.md"));
}

TEST_CASE("csv and json tables") {
  const auto csv = lines_of(report::emit_table(fixed_report(), report::Format::kCsv));
  REQUIRE(csv.size() == 3);
  CHECK(csv[0] ==
        "cell,lr,wd,selected,val_wga_mean,val_wga_std,val_oa_mean,val_oa_std,test_wga_mean,test_wga_std,"
        "test_oa_mean,test_oa_std,repeats");
  CHECK(csv[2] == "1,0.001,1e-05,1,0.812346,0.000000,0.910000,0.000000,0.790000,0.010000,0.895000,0.002000,3");

  const auto a = report::emit_table(fixed_report(), report::Format::kJson);
  CHECK(a == report::emit_table(fixed_report(), report::Format::kJson));
  const auto j = json_io::json::parse(a);
  CHECK(j.at("rows").size() == 2);
  CHECK(j.at("rows")[1].at("selected") == true);
  CHECK(j.at("rows")[1].at("val_wga_mean").get<double>() == 0.812346);
}

TEST_CASE("single-cell report gives one marked row") {
  auto r = fixed_report();
  r.cells.pop_back();
  r.selected_cell = 0;
  const auto rows = lines_of(report::emit_table(r, report::Format::kMarkdown));
  CHECK(rows[2].rfind("| 0 * |", 0) == 0);
  CHECK(rows[3].empty());
}

TEST_CASE("format parsing and csv quoting") {
  CHECK(report::parse_format("json") == report::Format::kJson);
  CHECK(report::parse_format("md") == report::Format::kMarkdown);
  CHECK_THROWS_AS(report::parse_format("xml"), SpecError);
  CHECK(report::csv_field("plain") == "plain");
  CHECK(report::csv_field("a,b") == "\"a,b\"");
  CHECK(report::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
}
