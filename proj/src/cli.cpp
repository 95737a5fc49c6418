#include "probebench/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <ostream>

#include "probebench/embstore.hpp"
#include "probebench/errors.hpp"
#include "probebench/gridrun.hpp"
#include "probebench/json_io.hpp"
#include "probebench/report.hpp"
#include "probebench/synthgen.hpp"

namespace probebench::cli {

namespace fs = std::filesystem;

namespace {

// Thrown by commands to leave with a specific status.
struct Exit {
  ExitStatus status;
  std::string message;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw Exit{kRuntimeFailure, "cannot write " + path.string()};
}

EmbeddingDataset load_dataset(const std::string& path) {
  if (!fs::exists(path)) throw Exit{kDataError, "no such file: " + path};
  try {
    return read_embs_file(path);
  } catch (const Error& e) {
    throw Exit{kDataError, path + ": " + e.what()};
  }
}

// Per split: example count and group histogram.
std::vector<std::vector<std::uint64_t>> histogram(const EmbeddingDataset& ds) {
  std::vector<std::vector<std::uint64_t>> h(kSplitCount, std::vector<std::uint64_t>(ds.group_count(), 0));
  for (std::size_t i = 0; i < ds.size(); ++i) ++h[ds.splits()[i]][ds.groups()[i]];
  return h;
}

int cmd_synth(const std::string& spec_path, const std::string& out_path, std::ostream& out) {
  synth::SynthSpec spec;
  try {
    spec = json_io::synth_spec_from_json(json_io::parse_file(spec_path));
  } catch (const Error& e) {
    throw Exit{kUsageError, spec_path + ": " + e.what()};
  }
  const auto dataset = synth::generate(spec);
  try {
    write_embs_file(dataset, out_path);
  } catch (const Error& e) {
    throw Exit{kRuntimeFailure, e.what()};
  }
  fs::path sidecar = fs::path(out_path).replace_extension(".json");
  if (sidecar != fs::path(out_path)) {
    const json_io::json provenance{{"generator", "synthgen"}, {"spec", json_io::to_json(spec)}};
    write_text(sidecar, json_io::canonical(provenance));
  }

  out << fmt::format("wrote {} ({} examples, dim {}, fingerprint {})\n", out_path, dataset.size(), dataset.dim(),
                     fingerprint(dataset));
  const std::array<const synth::GroupCounts*, kSplitCount> counts = {&spec.train_counts, &spec.val_counts,
                                                                     &spec.test_counts};
  const auto h = histogram(dataset);
  for (int s = 0; s < kSplitCount; ++s) {
    std::uint64_t n = 0;
    for (auto c : h[s]) n += c;
    out << fmt::format("  {:<10} n={:<6} groups (y1b1/y1b0/y0b1/y0b0) = {}/{}/{}/{}\n",
                       to_string(static_cast<Split>(s)), n, (*counts[s])[0], (*counts[s])[1], (*counts[s])[2],
                       (*counts[s])[3]);
  }
  out << fmt::format("  core oracle accuracy Phi(core_snr) = {:.6f}\n", synth::core_oracle_accuracy(spec));
  return kSuccess;
}

int cmd_grid(const std::string& embs_path, const std::string& grid_path, const std::string& method,
             const std::string& out_path, unsigned workers, std::ostream& out) {
  grid::GridSpec spec;
  if (!grid_path.empty()) {
    try {
      spec = json_io::grid_spec_from_json(json_io::parse_file(grid_path));
    } catch (const FormatError& e) {
      throw Exit{kDataError, grid_path + ": " + e.what()};
    } catch (const Error& e) {
      throw Exit{kUsageError, grid_path + ": " + e.what()};
    }
  }
  if (!method.empty()) {
    try {
      spec.method = grid::parse_method(method);
    } catch (const Error& e) {
      throw Exit{kUsageError, e.what()};
    }
  }
  const auto dataset = load_dataset(embs_path);
  grid::GridReport report;
  try {
    report = grid::run_grid(dataset, spec, {grid::resolve_workers(workers)});
  } catch (const InvariantError& e) {
    throw Exit{kDataError, e.what()};
  } catch (const Error& e) {
    throw Exit{kRuntimeFailure, e.what()};
  }
  write_text(out_path, json_io::canonical(json_io::to_json(report)));
  const auto& best = report.selected();
  out << fmt::format("{} runs ({} cells x {} seeds), method {}\n", report.cells.size() * spec.seeds.size(),
                     report.cells.size(), spec.seeds.size(), grid::to_string(spec.method));
  out << fmt::format("selected cell {} (lr={}, wd={}): val WGA {:.6f}, test WGA {:.6f} ± {:.6f}, test OA {:.6f} ± {:.6f}\n",
                     best.cell, best.lr, best.wd, best.validation.mean_wga, best.test.mean_wga, best.test.std_wga,
                     best.test.mean_oa, best.test.std_oa);
  out << "report written to " << out_path << "\n";
  return kSuccess;
}

int cmd_validate(const std::string& embs_path, std::ostream& out) {
  const auto dataset = load_dataset(embs_path);
  out << fmt::format("n={} dim={} class_count={} group_count={}\n", dataset.size(), dataset.dim(),
                     dataset.class_count(), dataset.group_count());
  const auto h = histogram(dataset);
  std::string header = fmt::format("{:<12}{:>8}", "split", "total");
  for (std::uint32_t g = 0; g < dataset.group_count(); ++g) header += fmt::format("{:>8}", fmt::format("g{}", g));
  out << header << "\n";
  for (int s = 0; s < kSplitCount; ++s) {
    std::uint64_t n = 0;
    for (auto c : h[s]) n += c;
    std::string line = fmt::format("{:<12}{:>8}", to_string(static_cast<Split>(s)), n);
    for (auto c : h[s]) line += fmt::format("{:>8}", c);
    out << line << "\n";
  }
  for (const auto& w : dataset_warnings(dataset)) out << "warning: " << w << "\n";
  out << "ok\n";
  return kSuccess;
}

int cmd_report(const std::vector<std::string>& paths, std::vector<std::string> labels, const std::string& format,
               const std::string& out_path, std::ostream& out) {
  const bool scatter = format == "scatter";
  std::optional<report::Format> table_format;
  if (!scatter) {
    try {
      table_format = report::parse_format(format);
    } catch (const Error& e) {
      throw Exit{kUsageError, e.what()};
    }
  }
  if (!labels.empty() && labels.size() != paths.size()) {
    throw Exit{kUsageError, "--label must be given once per report or not at all"};
  }
  std::vector<std::pair<std::string, grid::GridReport>> reports;
  for (std::size_t k = 0; k < paths.size(); ++k) {
    if (!fs::exists(paths[k])) throw Exit{kDataError, "no such file: " + paths[k]};
    try {
      const std::string label = labels.empty() ? fs::path(paths[k]).stem().string() : labels[k];
      reports.emplace_back(label, json_io::grid_report_from_json(json_io::parse_file(paths[k])));
    } catch (const std::exception& e) {
      throw Exit{kDataError, paths[k] + ": " + e.what()};
    }
  }

  std::string text;
  if (scatter) {
    text = report::emit_scatter(reports);
  } else if (reports.size() == 1) {
    text = report::emit_table(reports.front().second, *table_format);
  } else if (*table_format == report::Format::kMarkdown) {
    for (std::size_t k = 0; k < reports.size(); ++k) {
      if (k > 0) text += "\n";
      text += "### " + reports[k].first + "\n\n" + report::emit_table(reports[k].second, *table_format);
    }
  } else {
    throw Exit{kUsageError, "json and csv tables take exactly one report; use markdown or scatter for several"};
  }
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    write_text(out_path, text);
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linear-probe worst-group accuracy benchmark", "probe_bench"};
  app.require_subcommand(1);

  std::string spec_path, out_path;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic grouped-Gaussian EMBS dataset");
  synth_cmd->add_option("--spec", spec_path, "Synthetic spec JSON")->required();
  synth_cmd->add_option("--out", out_path, "Output EMBS path")->required();

  std::string embs_path, grid_path, method;
  unsigned workers = 0;
  auto* grid_cmd = app.add_subcommand("grid", "Run the lr x wd x seed grid and write a canonical JSON report");
  grid_cmd->add_option("--embs", embs_path, "Input EMBS dataset")->required();
  grid_cmd->add_option("--grid", grid_path, "Grid spec JSON (defaults to the standard 3x3x3 grid)");
  grid_cmd->add_option("--method", method, "erm or subg (overrides the grid file)");
  grid_cmd->add_option("--out", out_path, "Output report JSON")->required();
  grid_cmd->add_option("--workers", workers, "Parallel runs (default: $PROBE_BENCH_WORKERS or all cores)");

  auto* validate_cmd = app.add_subcommand("validate", "Check an EMBS file and print its group histogram");
  validate_cmd->add_option("embs", embs_path, "EMBS dataset")->required();

  std::vector<std::string> report_paths, labels;
  std::string format = "markdown";
  auto* report_cmd = app.add_subcommand("report", "Render grid reports as a table or a scatter CSV");
  report_cmd->add_option("reports", report_paths, "Grid report JSON files")->required();
  report_cmd->add_option("--format", format, "json, csv, markdown or scatter");
  report_cmd->add_option("--label", labels, "Label per report (defaults to the file stem)");
  report_cmd->add_option("--out", out_path, "Output path (default: stdout)");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*synth_cmd) return cmd_synth(spec_path, out_path, out);
    if (*grid_cmd) return cmd_grid(embs_path, grid_path, method, out_path, workers, out);
    if (*validate_cmd) return cmd_validate(embs_path, out);
    if (*report_cmd) return cmd_report(report_paths, labels, format, out_path, out);
  } catch (const Exit& e) {
    err << "error: " << e.message << "\n";
    return e.status;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
  return kUsageError;
}

}  // namespace probebench::cli
