#include "probebench/synthgen.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "probebench/errors.hpp"
#include "probebench/rng.hpp"

namespace probebench::synth {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void scale_to_unit(std::vector<double>& v) {
  const double norm = std::sqrt(dot(v, v));
  for (double& x : v) x /= norm;
}

// Removes the component along the unit vector `u`.
void reject(std::vector<double>& v, const std::vector<double>& u) {
  const double p = dot(v, u);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * u[i];
}

}  // namespace

void validate(const SynthSpec& spec) {
  if (spec.dim < 2) throw SpecError("dim", fmt::format("must be >= 2, got {}", spec.dim));
  if (!std::isfinite(spec.core_snr) || spec.core_snr < 0)
    throw SpecError("core_snr", "must be a finite nonnegative number");
  if (!std::isfinite(spec.spur_snr) || spec.spur_snr < 0)
    throw SpecError("spur_snr", "must be a finite nonnegative number");
  if (spec.train_counts[0] + spec.train_counts[1] == 0)
    throw SpecError("train_counts", "class 1 (slots 0 and 1) has no training examples");
  if (spec.train_counts[2] + spec.train_counts[3] == 0)
    throw SpecError("train_counts", "class 0 (slots 2 and 3) has no training examples");
}

Directions directions(const SynthSpec& spec) {
  validate(spec);
  auto gen = rng::Xoshiro256::substream(spec.seed, rng::Purpose::kSynthDirections);
  const std::size_t dim = spec.dim;
  for (;;) {
    std::vector<double> a(dim), b(dim);
    for (double& x : a) x = gen.normal();
    for (double& x : b) x = gen.normal();
    const double na = std::sqrt(dot(a, a));
    const double nb = std::sqrt(dot(b, b));
    if (na == 0.0 || nb == 0.0) continue;
    if (std::abs(dot(a, b)) / (na * nb) > 0.99) continue;
    scale_to_unit(a);
    // Two Gram-Schmidt passes keep |core . spur| at rounding level.
    reject(b, a);
    scale_to_unit(b);
    reject(b, a);
    scale_to_unit(b);
    return {std::move(a), std::move(b)};
  }
}

EmbeddingDataset generate(const SynthSpec& spec) {
  const Directions dirs = directions(spec);
  const std::size_t dim = spec.dim;
  const std::array<const GroupCounts*, kSplitCount> per_split = {&spec.train_counts, &spec.val_counts,
                                                                 &spec.test_counts};
  std::uint64_t n = 0;
  for (const auto* counts : per_split) n += std::accumulate(counts->begin(), counts->end(), std::uint64_t{0});

  std::vector<float> embeddings;
  embeddings.reserve(n * dim);
  std::vector<std::uint32_t> labels, groups;
  std::vector<std::uint8_t> splits;
  labels.reserve(n);
  groups.reserve(n);
  splits.reserve(n);

  std::vector<double> x(dim);
  std::uint64_t index = 0;
  for (int s = 0; s < kSplitCount; ++s) {
    for (std::size_t slot = 0; slot < 4; ++slot) {
      const std::uint32_t group = group_of_slot(slot);
      const std::uint32_t y = group / 2;
      const std::uint32_t b = group % 2;
      const double core_shift = spec.core_snr * (y == 1 ? 1.0 : -1.0);
      const double spur_shift = spec.spur_snr * (b == 1 ? 1.0 : -1.0);
      for (std::uint64_t k = 0; k < (*per_split[s])[slot]; ++k, ++index) {
        auto gen = rng::Xoshiro256::substream(spec.seed, rng::Purpose::kSynthExample, index);
        for (std::size_t d = 0; d < dim; ++d) {
          x[d] = core_shift * dirs.core[d] + spur_shift * dirs.spur[d] + gen.normal();
        }
        for (double v : x) embeddings.push_back(static_cast<float>(v));
        labels.push_back(y);
        groups.push_back(group);
        splits.push_back(static_cast<std::uint8_t>(s));
      }
    }
  }
  return EmbeddingDataset(spec.dim, 2, 4, std::move(embeddings), std::move(labels), std::move(groups),
                          std::move(splits));
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double core_oracle_accuracy(const SynthSpec& spec) { return normal_cdf(spec.core_snr); }

}  // namespace probebench::synth
