#include "probebench/json_io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <set>

#include "probebench/errors.hpp"

namespace probebench::json_io {

namespace {

constexpr const char* kReportFormat = "probe-bench-grid-report/1";

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const char* what) {
  if (!j.is_object()) throw SpecError(what, "expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw SpecError(key, fmt::format("unknown key in {}", what));
  }
}

template <typename T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw SpecError(key, e.what());
  }
}

template <typename T>
void read_optional(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = get_field<T>(j, key);
}

void read_nonnegative_int(const json& j, const char* key, std::uint64_t& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    throw SpecError(key, "expected a nonnegative integer");
  }
  out = v.get<std::uint64_t>();
}

void read_counts(const json& j, const char* key, synth::GroupCounts& out) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 4) throw SpecError(key, "expected an array of 4 counts");
  for (std::size_t k = 0; k < 4; ++k) {
    if (!v[k].is_number_integer() || (!v[k].is_number_unsigned() && v[k].get<std::int64_t>() < 0)) {
      throw SpecError(key, "counts must be nonnegative integers");
    }
    out[k] = v[k].get<std::uint64_t>();
  }
}

}  // namespace

synth::SynthSpec synth_spec_from_json(const json& j) {
  reject_unknown_keys(j, {"dim", "core_snr", "spur_snr", "train_counts", "val_counts", "test_counts", "seed"},
                      "synth spec");
  synth::SynthSpec spec;
  std::uint64_t dim = spec.dim;
  read_nonnegative_int(j, "dim", dim);
  if (dim > 0xFFFFFFFFULL) throw SpecError("dim", "too large");
  spec.dim = static_cast<std::uint32_t>(dim);
  read_optional(j, "core_snr", spec.core_snr);
  read_optional(j, "spur_snr", spec.spur_snr);
  read_counts(j, "train_counts", spec.train_counts);
  read_counts(j, "val_counts", spec.val_counts);
  read_counts(j, "test_counts", spec.test_counts);
  read_nonnegative_int(j, "seed", spec.seed);
  synth::validate(spec);
  return spec;
}

json to_json(const synth::SynthSpec& spec) {
  return json{{"dim", spec.dim},
              {"core_snr", spec.core_snr},
              {"spur_snr", spec.spur_snr},
              {"train_counts", spec.train_counts},
              {"val_counts", spec.val_counts},
              {"test_counts", spec.test_counts},
              {"seed", spec.seed}};
}

grid::GridSpec grid_spec_from_json(const json& j) {
  reject_unknown_keys(j, {"lrs", "wds", "seeds", "epochs", "batch_size", "method", "normalize"}, "grid spec");
  grid::GridSpec g;
  read_optional(j, "lrs", g.lrs);
  read_optional(j, "wds", g.wds);
  if (j.contains("seeds")) {
    const auto& v = j.at("seeds");
    if (!v.is_array()) throw SpecError("seeds", "expected an array");
    g.seeds.clear();
    for (const auto& s : v) {
      if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
        throw SpecError("seeds", "seeds must be nonnegative integers");
      }
      g.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  std::uint64_t epochs = g.epochs, batch = g.batch_size;
  read_nonnegative_int(j, "epochs", epochs);
  read_nonnegative_int(j, "batch_size", batch);
  if (epochs > 0xFFFFFFFFULL) throw SpecError("epochs", "too large");
  if (batch > 0xFFFFFFFFULL) throw SpecError("batch_size", "too large");
  g.epochs = static_cast<std::uint32_t>(epochs);
  g.batch_size = static_cast<std::uint32_t>(batch);
  if (j.contains("method")) g.method = grid::parse_method(get_field<std::string>(j, "method"));
  if (j.contains("normalize")) g.normalize = probe::parse_normalize(get_field<std::string>(j, "normalize"));
  grid::validate(g);
  return g;
}

json to_json(const grid::GridSpec& g) {
  return json{{"lrs", g.lrs},
              {"wds", g.wds},
              {"seeds", g.seeds},
              {"epochs", g.epochs},
              {"batch_size", g.batch_size},
              {"method", grid::to_string(g.method)},
              {"normalize", probe::to_string(g.normalize)}};
}

json to_json(const metrics::RunMetrics& m) {
  json acc = json::array();
  for (std::size_t g = 0; g < m.per_group_acc.size(); ++g) {
    if (m.per_group_counts[g] == 0) {
      acc.push_back(nullptr);
    } else {
      acc.push_back(m.per_group_acc[g]);
    }
  }
  return json{{"per_group_acc", acc}, {"per_group_counts", m.per_group_counts}, {"wga", m.wga}, {"oa", m.oa}};
}

metrics::RunMetrics run_metrics_from_json(const json& j) {
  metrics::RunMetrics m;
  m.per_group_counts = get_field<std::vector<std::uint64_t>>(j, "per_group_counts");
  for (const auto& v : j.at("per_group_acc")) m.per_group_acc.push_back(v.is_null() ? 0.0 : v.get<double>());
  if (m.per_group_acc.size() != m.per_group_counts.size()) {
    throw SpecError("per_group_acc", "length differs from per_group_counts");
  }
  m.wga = get_field<double>(j, "wga");
  m.oa = get_field<double>(j, "oa");
  return m;
}

json to_json(const metrics::AggregateMetrics& a) {
  return json{{"mean_wga", a.mean_wga}, {"std_wga", a.std_wga},           {"mean_oa", a.mean_oa},
              {"std_oa", a.std_oa},     {"repeat_count", a.repeat_count}};
}

metrics::AggregateMetrics aggregate_from_json(const json& j) {
  metrics::AggregateMetrics a;
  a.mean_wga = get_field<double>(j, "mean_wga");
  a.std_wga = get_field<double>(j, "std_wga");
  a.mean_oa = get_field<double>(j, "mean_oa");
  a.std_oa = get_field<double>(j, "std_oa");
  a.repeat_count = get_field<std::uint64_t>(j, "repeat_count");
  return a;
}

json to_json(const grid::GridReport& report) {
  json cells = json::array();
  for (const auto& cell : report.cells) {
    json runs = json::array();
    for (const auto& r : cell.runs) {
      runs.push_back(json{{"seed", r.seed},
                          {"train_size", r.train_size},
                          {"validation", to_json(r.validation)},
                          {"test", to_json(r.test)}});
    }
    cells.push_back(json{{"cell", cell.cell},
                         {"lr", cell.lr},
                         {"wd", cell.wd},
                         {"runs", runs},
                         {"validation", to_json(cell.validation)},
                         {"test", to_json(cell.test)}});
  }
  return json{{"format", kReportFormat},
              {"method", grid::to_string(report.grid.method)},
              {"grid", to_json(report.grid)},
              {"dataset_fingerprint", report.dataset_fingerprint},
              {"selected_cell", report.selected_cell},
              {"cells", cells}};
}

grid::GridReport grid_report_from_json(const json& j) {
  if (!j.is_object() || j.value("format", std::string{}) != kReportFormat) {
    throw SpecError("format", fmt::format("not a grid report (expected format \"{}\")", kReportFormat));
  }
  grid::GridReport report;
  report.grid = grid_spec_from_json(j.at("grid"));
  report.dataset_fingerprint = get_field<std::string>(j, "dataset_fingerprint");
  report.selected_cell = get_field<std::size_t>(j, "selected_cell");
  for (const auto& c : j.at("cells")) {
    grid::CellReport cell;
    cell.cell = get_field<std::size_t>(c, "cell");
    cell.lr = get_field<double>(c, "lr");
    cell.wd = get_field<double>(c, "wd");
    cell.validation = aggregate_from_json(c.at("validation"));
    cell.test = aggregate_from_json(c.at("test"));
    for (const auto& r : c.at("runs")) {
      grid::SeedRun run;
      run.seed = get_field<std::uint64_t>(r, "seed");
      run.train_size = get_field<std::uint64_t>(r, "train_size");
      run.validation = run_metrics_from_json(r.at("validation"));
      run.test = run_metrics_from_json(r.at("test"));
      cell.runs.push_back(std::move(run));
    }
    report.cells.push_back(std::move(cell));
  }
  if (report.selected_cell >= report.cells.size()) throw SpecError("selected_cell", "out of range");
  return report;
}

std::string canonical(const json& j) { return j.dump(2) + "\n"; }

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(FormatErrorKind::kIo, 0, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SpecError(path, e.what());
  }
}

}  // namespace probebench::json_io
