#pragma once

// Softmax linear probe on frozen embeddings, trained by plain minibatch SGD on
// the mean cross-entropy plus (wd/2)*||W||_F^2 (bias not decayed).

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "probebench/embstore.hpp"

namespace probebench::probe {

enum class Normalize { kNone, kL2PerVector };

const char* to_string(Normalize mode) noexcept;
Normalize parse_normalize(const std::string& text);

struct TrainConfig {
  double lr = 0.01;
  double wd = 0.0;
  std::uint32_t epochs = 20;
  std::uint32_t batch_size = 32;
  std::uint64_t seed = 0;  // drives shuffling only
  Normalize normalize = Normalize::kNone;
};

void validate(const TrainConfig& config);

class LinearModel {
 public:
  LinearModel(std::size_t class_count, std::size_t dim);
  LinearModel(std::size_t class_count, std::size_t dim, std::vector<double> weights, std::vector<double> bias);

  std::size_t class_count() const noexcept { return class_count_; }
  std::size_t dim() const noexcept { return dim_; }

  // class_count x dim, row-major.
  std::span<double> weights() noexcept { return weights_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<double> row(std::size_t c) noexcept { return std::span<double>(weights_).subspan(c * dim_, dim_); }
  std::span<const double> row(std::size_t c) const noexcept {
    return std::span<const double>(weights_).subspan(c * dim_, dim_);
  }
  std::span<double> bias() noexcept { return bias_; }
  std::span<const double> bias() const noexcept { return bias_; }

  bool is_finite() const noexcept;

  friend bool operator==(const LinearModel&, const LinearModel&) = default;

 private:
  std::size_t class_count_;
  std::size_t dim_;
  std::vector<double> weights_;
  std::vector<double> bias_;
};

// All-zero weights and bias.
LinearModel init_model(std::size_t dim, std::size_t class_count);

// Dense 64-bit copy of a view's embeddings (optionally L2-normalized per row).
struct Features {
  std::size_t rows = 0;
  std::size_t dim = 0;
  std::vector<double> values;
  std::vector<std::uint32_t> labels;

  std::span<const double> row(std::size_t i) const noexcept {
    return std::span<const double>(values).subspan(i * dim, dim);
  }
};

Features features_of(const SplitView& view, Normalize normalize);

// Rows `x` (B x dim, row-major) with labels `y`.
struct Batch {
  std::span<const double> x;
  std::span<const std::uint32_t> y;
};

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad_weights;
  std::vector<double> grad_bias;
};

LossAndGrad loss_and_grad(const LinearModel& model, Batch batch, double wd);

struct TrainResult {
  LinearModel model;
  // Mean minibatch objective of each epoch, weighted by batch size.
  std::vector<double> epoch_losses;
};

TrainResult train_with_history(const SplitView& train_view, const TrainConfig& config);
LinearModel train(const SplitView& train_view, const TrainConfig& config);

// Argmax of W x + b; ties go to the lowest class index.
std::vector<std::uint32_t> predict(const LinearModel& model, const SplitView& view,
                                   Normalize normalize = Normalize::kNone);
std::uint32_t predict_one(const LinearModel& model, std::span<const double> x) noexcept;

// LINM v1: "LINM", version u32, class_count u32, dim u32, W (f64 row-major), b (f64).
std::vector<std::byte> encode_model(const LinearModel& model);
LinearModel decode_model(std::span<const std::byte> bytes);
void write_model_file(const LinearModel& model, const std::filesystem::path& path);
LinearModel read_model_file(const std::filesystem::path& path);

}  // namespace probebench::probe
