#include "probebench/report.hpp"

#include <fmt/format.h>

#include <cmath>

#include "probebench/errors.hpp"
#include "probebench/json_io.hpp"

namespace probebench::report {

namespace {

std::string fraction(double v) { return fmt::format("{:.6f}", v); }
std::string percent(double v) { return fmt::format("{:.4f}", 100.0 * v); }
std::string mean_std(double mean, double sd) { return fraction(mean) + " ± " + fraction(sd); }
double round6(double v) { return std::round(v * 1e6) / 1e6; }

std::string emit_markdown(const grid::GridReport& report) {
  std::string out = "| cell | lr | wd | val WGA | val OA | test WGA | test OA |\n";
  out += "|---|---|---|---|---|---|---|\n";
  for (const auto& c : report.cells) {
    const bool selected = c.cell == report.selected_cell;
    out += fmt::format("| {}{} | {} | {} | {} | {} | {} | {} |\n", c.cell, selected ? " *" : "", c.lr, c.wd,
                       mean_std(c.validation.mean_wga, c.validation.std_wga),
                       mean_std(c.validation.mean_oa, c.validation.std_oa), mean_std(c.test.mean_wga, c.test.std_wga),
                       mean_std(c.test.mean_oa, c.test.std_oa));
  }
  out += fmt::format(
      "\n\\* selected by mean validation WGA. Method {}, {} seed(s), {} epochs, batch size {}. "
      "Accuracies are fractions in [0,1]; ± is the sample standard deviation over seeds.\n",
      grid::to_string(report.grid.method), report.grid.seeds.size(), report.grid.epochs, report.grid.batch_size);
  return out;
}

std::string emit_csv(const grid::GridReport& report) {
  std::string out =
      "cell,lr,wd,selected,val_wga_mean,val_wga_std,val_oa_mean,val_oa_std,"
      "test_wga_mean,test_wga_std,test_oa_mean,test_oa_std,repeats\n";
  for (const auto& c : report.cells) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", c.cell, c.lr, c.wd,
                       c.cell == report.selected_cell ? 1 : 0, fraction(c.validation.mean_wga),
                       fraction(c.validation.std_wga), fraction(c.validation.mean_oa), fraction(c.validation.std_oa),
                       fraction(c.test.mean_wga), fraction(c.test.std_wga), fraction(c.test.mean_oa),
                       fraction(c.test.std_oa), c.validation.repeat_count);
  }
  return out;
}

std::string emit_json(const grid::GridReport& report) {
  using json_io::json;
  json rows = json::array();
  for (const auto& c : report.cells) {
    rows.push_back(json{{"cell", c.cell},
                        {"lr", c.lr},
                        {"wd", c.wd},
                        {"selected", c.cell == report.selected_cell},
                        {"repeats", c.validation.repeat_count},
                        {"val_wga_mean", round6(c.validation.mean_wga)},
                        {"val_wga_std", round6(c.validation.std_wga)},
                        {"val_oa_mean", round6(c.validation.mean_oa)},
                        {"val_oa_std", round6(c.validation.std_oa)},
                        {"test_wga_mean", round6(c.test.mean_wga)},
                        {"test_wga_std", round6(c.test.std_wga)},
                        {"test_oa_mean", round6(c.test.mean_oa)},
                        {"test_oa_std", round6(c.test.std_oa)}});
  }
  const json doc{{"method", grid::to_string(report.grid.method)},
                 {"dataset_fingerprint", report.dataset_fingerprint},
                 {"selected_cell", report.selected_cell},
                 {"units", "fraction"},
                 {"rows", rows}};
  return json_io::canonical(doc);
}

}  // namespace

std::string format_reported(const Reported& r) { return fmt::format("{:.{}f}", r.value, r.decimals); }

Format parse_format(const std::string& text) {
  if (text == "json") return Format::kJson;
  if (text == "csv") return Format::kCsv;
  if (text == "markdown" || text == "md") return Format::kMarkdown;
  throw SpecError("format", "unknown table format \"" + text + "\" (expected json, csv or markdown)");
}

std::string emit_table(const grid::GridReport& report, Format format) {
  switch (format) {
    case Format::kJson: return emit_json(report);
    case Format::kCsv: return emit_csv(report);
    case Format::kMarkdown: return emit_markdown(report);
  }
  throw SpecError("format", "unknown table format");
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string emit_scatter(std::span<const std::pair<std::string, grid::GridReport>> reports) {
  std::string out = "label,oa,wga,source\n";
  for (const auto& [label, report] : reports) {
    const auto& c = report.selected();
    out += fmt::format("{},{},{},{}\n", csv_field(label), percent(c.test.mean_oa), percent(c.test.mean_wga),
                       csv_field(fmt::format("computed: {} cell {} test split mean of {} seed(s)",
                                             grid::to_string(report.grid.method), c.cell, c.test.repeat_count)));
  }
  for (const auto& e : reference_entries()) {
    out += fmt::format("{},{},{},{}\n", csv_field(e.name), format_reported(e.oa_mean), format_reported(e.wga_mean),
                       e.source);
  }
  // Two endpoints of the oa = wga diagonal.
  out += "y=x,0.0,0.0,reference line oa = wga\n";
  out += "y=x,100.0,100.0,reference line oa = wga\n";
  return out;
}

}  // namespace probebench::report
