#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "probebench/gridrun.hpp"

namespace probebench::report {

// A number exactly as printed in a published table (e.g. 90.13 with two decimals).
struct Reported {
  double value = 0.0;
  int decimals = 2;
};

std::string format_reported(const Reported& r);

// One published row. Percentages, never recomputed.
struct ReferenceEntry {
  std::string name;
  std::string pretraining;  // imagenet, swag, swag+imagenet-ft
  Reported wga_mean;
  std::optional<Reported> wga_std;
  Reported oa_mean;
  std::optional<Reported> oa_std;
  std::string source;  // "Table N"
};

// Tables 1-8 of the published results, in table order.
std::span<const ReferenceEntry> reference_entries();

enum class Format { kJson, kCsv, kMarkdown };

Format parse_format(const std::string& text);

// One row per grid cell: mean +- std WGA/OA on validation and test. Computed
// accuracies are fractions in [0,1] with six fractional digits.
std::string emit_table(const grid::GridReport& report, Format format);

// CSV (label, oa, wga, source) in percent: the selected cell's test point of
// each report, every reference entry, and the two endpoints of the y=x line.
std::string emit_scatter(std::span<const std::pair<std::string, grid::GridReport>> reports);

std::string csv_field(const std::string& text);

}  // namespace probebench::report
