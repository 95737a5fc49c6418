#pragma once

// JSON forms of the configuration and report types. Reports are written in a
// canonical form (sorted keys, shortest round-trip doubles, two-space indent,
// trailing newline) so byte equality of two reports is meaningful.

#include <json.hpp>
#include <string>

#include "probebench/gridrun.hpp"
#include "probebench/metrics.hpp"
#include "probebench/synthgen.hpp"

namespace probebench::json_io {

using nlohmann::json;

// Object with exactly the keys dim, core_snr, spur_snr, train_counts,
// val_counts, test_counts, seed. Missing keys keep their defaults; unknown
// keys are rejected with SpecError.
synth::SynthSpec synth_spec_from_json(const json& j);
json to_json(const synth::SynthSpec& spec);

// Keys lrs, wds, seeds, epochs, batch_size, method, normalize.
grid::GridSpec grid_spec_from_json(const json& j);
json to_json(const grid::GridSpec& grid);

json to_json(const metrics::RunMetrics& m);
metrics::RunMetrics run_metrics_from_json(const json& j);
json to_json(const metrics::AggregateMetrics& a);
metrics::AggregateMetrics aggregate_from_json(const json& j);

json to_json(const grid::GridReport& report);
grid::GridReport grid_report_from_json(const json& j);

std::string canonical(const json& j);

json parse_file(const std::string& path);

}  // namespace probebench::json_io
