#include "probebench/probe.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numeric>

#include "probebench/errors.hpp"
#include "probebench/rng.hpp"

namespace probebench::probe {

namespace {

// Logits W x + b into `out`.
void logits(const LinearModel& model, std::span<const double> x, std::span<double> out) noexcept {
  for (std::size_t c = 0; c < model.class_count(); ++c) {
    const auto w = model.row(c);
    double z = model.bias()[c];
    for (std::size_t d = 0; d < x.size(); ++d) z += w[d] * x[d];
    out[c] = z;
  }
}

// Softmax in place; returns log-sum-exp.
double softmax(std::span<double> z) noexcept {
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (double& v : z) v /= sum;
  return zmax + std::log(sum);
}

double squared_norm(std::span<const double> v) noexcept {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

const char* to_string(Normalize mode) noexcept {
  return mode == Normalize::kL2PerVector ? "l2_per_vector" : "none";
}

Normalize parse_normalize(const std::string& text) {
  if (text == "none") return Normalize::kNone;
  if (text == "l2_per_vector") return Normalize::kL2PerVector;
  throw SpecError("normalize", "expected \"none\" or \"l2_per_vector\", got \"" + text + "\"");
}

void validate(const TrainConfig& config) {
  if (!(config.lr > 0) || !std::isfinite(config.lr)) throw SpecError("lr", "must be a finite positive number");
  if (!(config.wd >= 0) || !std::isfinite(config.wd)) throw SpecError("wd", "must be a finite nonnegative number");
  if (config.epochs < 1) throw SpecError("epochs", "must be >= 1");
  if (config.batch_size < 1) throw SpecError("batch_size", "must be >= 1");
}

LinearModel::LinearModel(std::size_t class_count, std::size_t dim)
    : class_count_(class_count), dim_(dim), weights_(class_count * dim, 0.0), bias_(class_count, 0.0) {}

LinearModel::LinearModel(std::size_t class_count, std::size_t dim, std::vector<double> weights,
                         std::vector<double> bias)
    : class_count_(class_count), dim_(dim), weights_(std::move(weights)), bias_(std::move(bias)) {
  if (weights_.size() != class_count_ * dim_ || bias_.size() != class_count_) {
    throw InvariantError(fmt::format("model shape mismatch: {} weights and {} biases for {}x{}", weights_.size(),
                                     bias_.size(), class_count_, dim_));
  }
}

bool LinearModel::is_finite() const noexcept {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(weights_.begin(), weights_.end(), finite) && std::all_of(bias_.begin(), bias_.end(), finite);
}

LinearModel init_model(std::size_t dim, std::size_t class_count) {
  if (dim < 1) throw SpecError("dim", "must be >= 1");
  if (class_count < 2) throw SpecError("class_count", "must be >= 2");
  return LinearModel(class_count, dim);
}

Features features_of(const SplitView& view, Normalize normalize) {
  Features f;
  f.rows = view.size();
  f.dim = view.dataset().dim();
  f.values.resize(f.rows * f.dim);
  f.labels.resize(f.rows);
  for (std::size_t k = 0; k < f.rows; ++k) {
    const auto src = view.row(k);
    double* dst = f.values.data() + k * f.dim;
    std::copy(src.begin(), src.end(), dst);
    if (normalize == Normalize::kL2PerVector) {
      // Zero vectors are left as they are.
      const double norm = std::sqrt(squared_norm({dst, f.dim}));
      if (norm > 0.0) {
        for (std::size_t d = 0; d < f.dim; ++d) dst[d] /= norm;
      }
    }
    f.labels[k] = view.label(k);
  }
  return f;
}

LossAndGrad loss_and_grad(const LinearModel& model, Batch batch, double wd) {
  const std::size_t classes = model.class_count();
  const std::size_t dim = model.dim();
  const std::size_t count = batch.y.size();
  if (count == 0) throw TrainingError("loss_and_grad: empty batch");
  if (batch.x.size() != count * dim) {
    throw TrainingError(fmt::format("loss_and_grad: batch has {} values, expected {}x{}", batch.x.size(), count, dim));
  }

  LossAndGrad out;
  out.grad_weights.assign(classes * dim, 0.0);
  out.grad_bias.assign(classes, 0.0);
  std::vector<double> p(classes);
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const auto x = batch.x.subspan(i * dim, dim);
    const std::uint32_t y = batch.y[i];
    if (y >= classes) throw TrainingError(fmt::format("loss_and_grad: label {} out of range", y));
    logits(model, x, p);
    const double z_y = p[y];
    const double lse = softmax(p);
    total += lse - z_y;
    p[y] -= 1.0;
    for (std::size_t c = 0; c < classes; ++c) {
      double* g = out.grad_weights.data() + c * dim;
      for (std::size_t d = 0; d < dim; ++d) g[d] += p[c] * x[d];
      out.grad_bias[c] += p[c];
    }
  }
  const double inv = 1.0 / static_cast<double>(count);
  const auto w = model.weights();
  for (std::size_t k = 0; k < out.grad_weights.size(); ++k) out.grad_weights[k] = out.grad_weights[k] * inv + wd * w[k];
  for (double& g : out.grad_bias) g *= inv;
  out.loss = total * inv + 0.5 * wd * squared_norm(w);
  if (!std::isfinite(out.loss)) throw TrainingError("loss_and_grad: non-finite loss");
  return out;
}

TrainResult train_with_history(const SplitView& train_view, const TrainConfig& config) {
  validate(config);
  if (train_view.empty()) throw TrainingError("training view is empty");
  const EmbeddingDataset& ds = train_view.dataset();
  const Features features = features_of(train_view, config.normalize);
  {
    std::vector<bool> seen(ds.class_count(), false);
    for (auto y : features.labels) seen[y] = true;
    if (std::count(seen.begin(), seen.end(), true) < 2) {
      throw TrainingError("training view contains a single class");
    }
  }

  const std::size_t n = features.rows;
  const std::size_t dim = features.dim;
  const std::size_t batch_size = std::min<std::size_t>(config.batch_size, n);
  TrainResult result{init_model(dim, ds.class_count()), {}};
  LinearModel& model = result.model;

  std::vector<std::size_t> order(n);
  std::vector<std::size_t> members;
  std::vector<double> xb;
  std::vector<std::uint32_t> yb;
  for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto gen = rng::Xoshiro256::substream(config.seed, rng::Purpose::kShuffle, epoch);
    rng::shuffle(std::span<std::size_t>(order), gen);

    double epoch_total = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += batch_size, ++batch_index) {
      const std::size_t stop = std::min(n, start + batch_size);
      // The gradient depends only on the batch membership, not on its order.
      members.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(stop));
      std::sort(members.begin(), members.end());
      xb.resize(members.size() * dim);
      yb.resize(members.size());
      for (std::size_t k = 0; k < members.size(); ++k) {
        const auto src = features.row(members[k]);
        std::copy(src.begin(), src.end(), xb.begin() + static_cast<std::ptrdiff_t>(k * dim));
        yb[k] = features.labels[members[k]];
      }

      LossAndGrad lg;
      try {
        lg = loss_and_grad(model, {xb, yb}, config.wd);
      } catch (const TrainingError& e) {
        throw TrainingError(fmt::format("epoch {}, batch {}: {}", epoch, batch_index, e.what()));
      }
      epoch_total += lg.loss * static_cast<double>(members.size());
      auto w = model.weights();
      for (std::size_t k = 0; k < w.size(); ++k) w[k] -= config.lr * lg.grad_weights[k];
      auto b = model.bias();
      for (std::size_t c = 0; c < b.size(); ++c) b[c] -= config.lr * lg.grad_bias[c];
      if (!model.is_finite()) {
        throw TrainingError(fmt::format("epoch {}, batch {}: parameters became non-finite", epoch, batch_index));
      }
    }
    result.epoch_losses.push_back(epoch_total / static_cast<double>(n));
  }
  return result;
}

LinearModel train(const SplitView& train_view, const TrainConfig& config) {
  return train_with_history(train_view, config).model;
}

std::uint32_t predict_one(const LinearModel& model, std::span<const double> x) noexcept {
  std::uint32_t best = 0;
  double best_z = 0.0;
  for (std::size_t c = 0; c < model.class_count(); ++c) {
    const auto w = model.row(c);
    double z = model.bias()[c];
    for (std::size_t d = 0; d < x.size(); ++d) z += w[d] * x[d];
    if (c == 0 || z > best_z) {
      best = static_cast<std::uint32_t>(c);
      best_z = z;
    }
  }
  return best;
}

std::vector<std::uint32_t> predict(const LinearModel& model, const SplitView& view, Normalize normalize) {
  if (view.dataset().dim() != model.dim()) {
    throw InvariantError(fmt::format("model dim {} does not match dataset dim {}", model.dim(), view.dataset().dim()));
  }
  const Features f = features_of(view, normalize);
  std::vector<std::uint32_t> out(f.rows);
  for (std::size_t i = 0; i < f.rows; ++i) out[i] = predict_one(model, f.row(i));
  return out;
}

namespace {

constexpr char kModelMagic[4] = {'L', 'I', 'N', 'M'};
constexpr std::uint32_t kModelVersion = 1;
constexpr std::size_t kModelHeader = 16;

void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
}

void put_f64(std::vector<std::byte>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((bits >> (8 * i)) & 0xFFu));
}

std::uint64_t get_uint(std::span<const std::byte> bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= std::to_integer<std::uint64_t>(bytes[offset + i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::byte> encode_model(const LinearModel& model) {
  std::vector<std::byte> out;
  out.reserve(kModelHeader + 8 * (model.weights().size() + model.bias().size()));
  for (char c : kModelMagic) out.push_back(static_cast<std::byte>(c));
  put_u32(out, kModelVersion);
  put_u32(out, static_cast<std::uint32_t>(model.class_count()));
  put_u32(out, static_cast<std::uint32_t>(model.dim()));
  for (double v : model.weights()) put_f64(out, v);
  for (double v : model.bias()) put_f64(out, v);
  return out;
}

LinearModel decode_model(std::span<const std::byte> bytes) {
  using K = FormatErrorKind;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kModelMagic, 4) != 0) {
    throw FormatError(K::kBadMagic, 0, "expected \"LINM\"");
  }
  if (bytes.size() < kModelHeader) throw FormatError(K::kTruncated, bytes.size(), "model header cut short");
  const auto version = get_uint(bytes, 4, 4);
  if (version != kModelVersion) throw FormatError(K::kUnsupportedVersion, 4, fmt::format("version {}", version));
  const std::uint64_t classes = get_uint(bytes, 8, 4);
  const std::uint64_t dim = get_uint(bytes, 12, 4);
  if (classes < 2) throw FormatError(K::kBadHeader, 8, "class_count must be >= 2");
  if (dim < 1) throw FormatError(K::kBadHeader, 12, "dim must be >= 1");
  const std::uint64_t expected = kModelHeader + 8 * (classes * dim + classes);
  if (bytes.size() != expected) {
    throw FormatError(bytes.size() < expected ? K::kTruncated : K::kBadHeader, std::min<std::uint64_t>(bytes.size(), expected),
                      fmt::format("expected {} bytes, got {}", expected, bytes.size()));
  }
  std::vector<double> w(classes * dim), b(classes);
  std::size_t off = kModelHeader;
  for (double& v : w) {
    v = std::bit_cast<double>(get_uint(bytes, off, 8));
    if (!std::isfinite(v)) throw FormatError(K::kNonFinite, off, "weight");
    off += 8;
  }
  for (double& v : b) {
    v = std::bit_cast<double>(get_uint(bytes, off, 8));
    if (!std::isfinite(v)) throw FormatError(K::kNonFinite, off, "bias");
    off += 8;
  }
  return LinearModel(classes, dim, std::move(w), std::move(b));
}

void write_model_file(const LinearModel& model, const std::filesystem::path& path) {
  const auto bytes = encode_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError(FormatErrorKind::kIo, 0, "cannot write " + path.string());
}

LinearModel read_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatErrorKind::kIo, 0, "cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_model(std::as_bytes(std::span<const char>(raw)));
}

}  // namespace probebench::probe
