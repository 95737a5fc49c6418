#pragma once

// Waterbirds-analog grouped Gaussian embeddings.
//
// Each example has a class y in {0,1} and a background b in {0,1}, stored as
// group 2*y + b. With signs s_y = 2y-1 and s_b = 2b-1:
//
//   x = core_snr * s_y * e_core + spur_snr * s_b * e_spur + N(0, I)
//
// where e_core and e_spur are seeded orthonormal directions. Count tuples are
// ordered (y=1,b=1), (y=1,b=0), (y=0,b=1), (y=0,b=0), i.e. groups 3, 2, 1, 0.

#include <array>
#include <cstdint>
#include <vector>

#include "probebench/embstore.hpp"

namespace probebench::synth {

using GroupCounts = std::array<std::uint64_t, 4>;

inline constexpr GroupCounts kWaterbirdsTrain = {3498, 184, 56, 1057};
inline constexpr GroupCounts kWaterbirdsVal = {467, 466, 133, 133};
inline constexpr GroupCounts kWaterbirdsTest = {2255, 2255, 642, 642};

struct SynthSpec {
  std::uint32_t dim = 64;
  double core_snr = 1.0;
  double spur_snr = 3.0;
  GroupCounts train_counts = kWaterbirdsTrain;
  GroupCounts val_counts = kWaterbirdsVal;
  GroupCounts test_counts = kWaterbirdsTest;
  std::uint64_t seed = 0;
};

// Throws SpecError naming the offending field.
void validate(const SynthSpec& spec);

// Position k of a count tuple -> group id (2*y + b).
constexpr std::uint32_t group_of_slot(std::size_t k) noexcept { return static_cast<std::uint32_t>(3 - k); }

struct Directions {
  std::vector<double> core;
  std::vector<double> spur;
};

Directions directions(const SynthSpec& spec);

EmbeddingDataset generate(const SynthSpec& spec);

// Phi(core_snr): accuracy of sign(x . e_core) on every group.
double core_oracle_accuracy(const SynthSpec& spec);

// Standard normal CDF.
double normal_cdf(double x) noexcept;

}  // namespace probebench::synth
