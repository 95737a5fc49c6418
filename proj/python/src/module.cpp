#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "probebench/embstore.hpp"
#include "probebench/errors.hpp"
#include "probebench/gridrun.hpp"
#include "probebench/json_io.hpp"
#include "probebench/metrics.hpp"
#include "probebench/probe.hpp"
#include "probebench/report.hpp"
#include "probebench/synthgen.hpp"

namespace py = pybind11;
using namespace probebench;
using namespace probebench::json_io;

namespace {

template <typename T>
using Array = py::array_t<T, py::array::c_style | py::array::forcecast>;

template <typename T>
std::vector<T> to_vector(const Array<T>& a) {
  return std::vector<T>(a.data(), a.data() + a.size());
}

template <typename T>
py::array_t<T> to_numpy(std::span<const T> values) {
  py::array_t<T> out(static_cast<py::ssize_t>(values.size()));
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

std::uint32_t count_from(const std::vector<std::uint32_t>& ids, py::object given) {
  if (!given.is_none()) return given.cast<std::uint32_t>();
  return ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1;
}

EmbeddingDataset dataset_from(const Array<float>& embeddings, const Array<std::uint32_t>& labels,
                              const Array<std::uint32_t>& groups, const Array<std::uint8_t>& splits,
                              py::object class_count, py::object group_count) {
  if (embeddings.ndim() != 2) throw py::value_error("embeddings must be a 2-d array");
  auto y = to_vector(labels);
  auto g = to_vector(groups);
  const auto classes = count_from(y, std::move(class_count));
  const auto group_total = count_from(g, std::move(group_count));
  return EmbeddingDataset(static_cast<std::uint32_t>(embeddings.shape(1)), classes, group_total, to_vector(embeddings),
                          std::move(y), std::move(g), to_vector(splits));
}

py::dict dataset_to_dict(const EmbeddingDataset& ds) {
  py::dict d;
  auto emb = to_numpy<float>(ds.embeddings());
  emb.resize({static_cast<py::ssize_t>(ds.size()), static_cast<py::ssize_t>(ds.dim())});
  d["embeddings"] = emb;
  d["labels"] = to_numpy<std::uint32_t>(ds.labels());
  d["groups"] = to_numpy<std::uint32_t>(ds.groups());
  d["splits"] = to_numpy<std::uint8_t>(ds.splits());
  d["class_count"] = ds.class_count();
  d["group_count"] = ds.group_count();
  return d;
}

EmbeddingDataset dataset_from_dict(const py::dict& d) {
  auto get = [&](const char* key) -> py::object {
    if (d.contains(key)) return py::reinterpret_borrow<py::object>(d[key]);
    return py::none();
  };
  return dataset_from(d["embeddings"].cast<Array<float>>(), d["labels"].cast<Array<std::uint32_t>>(),
                      d["groups"].cast<Array<std::uint32_t>>(), d["splits"].cast<Array<std::uint8_t>>(),
                      get("class_count"), get("group_count"));
}

json json_from_py(const py::object& obj) {
  auto dumps = py::module_::import("json").attr("dumps");
  return json::parse(dumps(obj).cast<std::string>());
}

py::object py_from_json(const json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

// Every example goes into the training split under a single group.
EmbeddingDataset training_dataset(const Array<float>& x, const Array<std::uint32_t>& y) {
  if (x.ndim() != 2) throw py::value_error("x must be a 2-d array");
  auto labels = to_vector(y);
  const auto classes = std::max<std::uint32_t>(2, count_from(labels, py::none()));
  std::vector<std::uint32_t> groups(labels.size(), 0);
  std::vector<std::uint8_t> splits(labels.size(), static_cast<std::uint8_t>(Split::kTrain));
  return EmbeddingDataset(static_cast<std::uint32_t>(x.shape(1)), classes, 1, to_vector(x), std::move(labels),
                          std::move(groups), std::move(splits));
}

}  // namespace

PYBIND11_MODULE(_probebench, m) {
  auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<SpecError>(m, "SpecError", base.ptr());
  py::register_exception<TrainingError>(m, "TrainingError", base.ptr());

  m.def(
      "generate",
      [](const py::object& spec) {
        const auto s = spec.is_none() ? synth::SynthSpec{} : synth_spec_from_json(json_from_py(spec));
        return dataset_to_dict(synth::generate(s));
      },
      py::arg("spec") = py::none(), "Generate a synthetic dataset from a spec dict; returns a dict of arrays.");

  m.def(
      "core_oracle_accuracy",
      [](double core_snr) {
        synth::SynthSpec s;
        s.core_snr = core_snr;
        return synth::core_oracle_accuracy(s);
      },
      py::arg("core_snr"));

  m.def(
      "write_embs",
      [](const std::string& path, const py::dict& dataset) { write_embs_file(dataset_from_dict(dataset), path); },
      py::arg("path"), py::arg("dataset"));

  m.def(
      "read_embs", [](const std::string& path) { return dataset_to_dict(read_embs_file(path)); }, py::arg("path"));

  m.def(
      "encode_embs",
      [](const py::dict& dataset) {
        const auto bytes = encode_embs(dataset_from_dict(dataset));
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
      },
      py::arg("dataset"));

  m.def(
      "decode_embs",
      [](const py::bytes& data) {
        const std::string_view view = data;
        return dataset_to_dict(decode_embs(std::as_bytes(std::span(view.data(), view.size()))));
      },
      py::arg("data"));

  m.def(
      "fingerprint", [](const py::dict& dataset) { return fingerprint(dataset_from_dict(dataset)); },
      py::arg("dataset"));

  m.def(
      "train",
      [](const Array<float>& x, const Array<std::uint32_t>& y, double lr, double wd, std::uint32_t epochs,
         std::uint32_t batch_size, std::uint64_t seed, const std::string& normalize) {
        const auto ds = training_dataset(x, y);
        probe::TrainConfig config{lr, wd, epochs, batch_size, seed, probe::parse_normalize(normalize)};
        const auto model = probe::train(split_view(ds, Split::kTrain), config);
        py::array_t<double> w = to_numpy<double>(model.weights());
        w.resize({static_cast<py::ssize_t>(model.class_count()), static_cast<py::ssize_t>(model.dim())});
        return py::make_tuple(w, to_numpy<double>(model.bias()));
      },
      py::arg("x"), py::arg("y"), py::arg("lr") = 0.01, py::arg("wd") = 0.0, py::arg("epochs") = 20,
      py::arg("batch_size") = 32, py::arg("seed") = 0, py::arg("normalize") = "none",
      "Train a softmax probe; returns (weights[classes, dim], bias[classes]).");

  m.def(
      "predict",
      [](const Array<double>& weights, const Array<double>& bias, const Array<float>& x, const std::string& normalize) {
        if (weights.ndim() != 2 || x.ndim() != 2) throw py::value_error("weights and x must be 2-d arrays");
        const probe::LinearModel model(static_cast<std::size_t>(weights.shape(0)),
                                       static_cast<std::size_t>(weights.shape(1)), to_vector(weights),
                                       to_vector(bias));
        std::vector<std::uint32_t> y(static_cast<std::size_t>(x.shape(0)), 0);
        if (!y.empty()) y[0] = 1;  // labels are irrelevant to prediction but the dataset needs two classes
        Array<std::uint32_t> labels(static_cast<py::ssize_t>(y.size()), y.data());
        const auto ds = training_dataset(x, labels);
        return to_numpy<std::uint32_t>(probe::predict(model, split_view(ds, Split::kTrain),
                                                      probe::parse_normalize(normalize)));
      },
      py::arg("weights"), py::arg("bias"), py::arg("x"), py::arg("normalize") = "none");

  m.def(
      "group_metrics",
      [](const Array<std::uint32_t>& preds, const Array<std::uint32_t>& labels, const Array<std::uint32_t>& groups,
         std::uint32_t group_count) {
        const auto p = to_vector(preds), y = to_vector(labels), g = to_vector(groups);
        return py_from_json(to_json(metrics::group_metrics(p, y, g, group_count)));
      },
      py::arg("preds"), py::arg("labels"), py::arg("groups"), py::arg("group_count"));

  m.def(
      "aggregate",
      [](const py::list& runs) {
        std::vector<metrics::RunMetrics> parsed;
        for (const auto& r : runs) parsed.push_back(run_metrics_from_json(json_from_py(py::reinterpret_borrow<py::object>(r))));
        return py_from_json(to_json(metrics::aggregate(parsed)));
      },
      py::arg("runs"));

  m.def(
      "run_grid",
      [](const py::dict& dataset, const py::object& grid, unsigned workers) {
        const auto ds = dataset_from_dict(dataset);
        const auto g = grid.is_none() ? grid::GridSpec{} : grid_spec_from_json(json_from_py(grid));
        std::string out;
        {
          py::gil_scoped_release release;
          out = canonical(to_json(grid::run_grid(ds, g, {grid::resolve_workers(workers)})));
        }
        return out;
      },
      py::arg("dataset"), py::arg("grid") = py::none(), py::arg("workers") = 0,
      "Run the hyperparameter grid; returns the canonical JSON report text.");

  m.def(
      "emit_table",
      [](const std::string& report_json, const std::string& format) {
        return report::emit_table(grid_report_from_json(json::parse(report_json)), report::parse_format(format));
      },
      py::arg("report_json"), py::arg("format") = "markdown");

  m.def(
      "emit_scatter",
      [](const std::vector<std::pair<std::string, std::string>>& labelled) {
        std::vector<std::pair<std::string, grid::GridReport>> reports;
        for (const auto& [label, text] : labelled) reports.emplace_back(label, grid_report_from_json(json::parse(text)));
        return report::emit_scatter(reports);
      },
      py::arg("reports") = std::vector<std::pair<std::string, std::string>>{});
}
