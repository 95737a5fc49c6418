#pragma once

// EMBS v1: the binary embedding-dataset format shared by the numerics core and
// the Python extractor.
//
//   offset  size       field
//   0       4          magic "EMBS"
//   4       4          version (u32, = 1)
//   8       8          n (u64)
//   16      4          dim (u32)
//   20      4          class_count (u32)
//   24      4          group_count (u32)
//   28      4          reserved (u32, = 0)
//   32      4*n*dim    embeddings, f32 row-major
//   ...     4*n        labels (u32)
//   ...     4*n        groups (u32)
//   ...     n          splits (u8: 0 train, 1 validation, 2 test)
//
// All integers and floats are little-endian.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace probebench {

enum class Split : std::uint8_t { kTrain = 0, kValidation = 1, kTest = 2 };

inline constexpr int kSplitCount = 3;
const char* to_string(Split split) noexcept;

inline constexpr std::size_t kEmbsHeaderSize = 32;
inline constexpr std::uint32_t kEmbsVersion = 1;

// Immutable group-structured embedding dataset. The constructor enforces every
// invariant, so any instance is valid.
class EmbeddingDataset {
 public:
  EmbeddingDataset(std::uint32_t dim, std::uint32_t class_count, std::uint32_t group_count,
                   std::vector<float> embeddings, std::vector<std::uint32_t> labels,
                   std::vector<std::uint32_t> groups, std::vector<std::uint8_t> splits);

  std::size_t size() const noexcept { return labels_.size(); }
  std::uint32_t dim() const noexcept { return dim_; }
  std::uint32_t class_count() const noexcept { return class_count_; }
  std::uint32_t group_count() const noexcept { return group_count_; }

  std::span<const float> embeddings() const noexcept { return embeddings_; }
  std::span<const float> row(std::size_t i) const noexcept {
    return std::span<const float>(embeddings_).subspan(i * dim_, dim_);
  }
  std::span<const std::uint32_t> labels() const noexcept { return labels_; }
  std::span<const std::uint32_t> groups() const noexcept { return groups_; }
  std::span<const std::uint8_t> splits() const noexcept { return splits_; }

  // Field-by-field equality; floats compared by bit pattern.
  friend bool operator==(const EmbeddingDataset& a, const EmbeddingDataset& b) noexcept;

 private:
  std::uint32_t dim_;
  std::uint32_t class_count_;
  std::uint32_t group_count_;
  std::vector<float> embeddings_;
  std::vector<std::uint32_t> labels_;
  std::vector<std::uint32_t> groups_;
  std::vector<std::uint8_t> splits_;
};

// Soft checks: a split that is present but lacks some class. Minority groups
// can legitimately be absent, so these are warnings rather than errors.
std::vector<std::string> dataset_warnings(const EmbeddingDataset& dataset);

// Examples of one split, in file order.
class SplitView {
 public:
  // `indices` must be strictly increasing, in range, and all carry `split`.
  SplitView(const EmbeddingDataset& dataset, Split split, std::vector<std::size_t> indices);

  const EmbeddingDataset& dataset() const noexcept { return *dataset_; }
  Split split() const noexcept { return split_; }
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }

  std::uint32_t label(std::size_t k) const noexcept { return dataset_->labels()[indices_[k]]; }
  std::uint32_t group(std::size_t k) const noexcept { return dataset_->groups()[indices_[k]]; }
  std::span<const float> row(std::size_t k) const noexcept { return dataset_->row(indices_[k]); }

 private:
  const EmbeddingDataset* dataset_;
  Split split_;
  std::vector<std::size_t> indices_;
};

SplitView split_view(const EmbeddingDataset& dataset, Split split);

// Exact byte size of the EMBS encoding of a dataset with these dimensions.
std::uint64_t embs_size(std::uint64_t n, std::uint64_t dim) noexcept;

std::vector<std::byte> encode_embs(const EmbeddingDataset& dataset);
void write_embs(const EmbeddingDataset& dataset, std::ostream& sink);
void write_embs_file(const EmbeddingDataset& dataset, const std::filesystem::path& path);

// Throws FormatError naming the byte offset of the first bad field.
EmbeddingDataset decode_embs(std::span<const std::byte> bytes);
EmbeddingDataset read_embs(std::istream& source);
EmbeddingDataset read_embs_file(const std::filesystem::path& path);

// 64-bit FNV-1a over the canonical EMBS encoding, as 16 lowercase hex digits.
std::string fingerprint(const EmbeddingDataset& dataset);
std::uint64_t fnv1a64(std::span<const std::byte> bytes) noexcept;

}  // namespace probebench
