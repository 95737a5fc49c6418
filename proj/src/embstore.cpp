#include "probebench/embstore.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>

#include "probebench/errors.hpp"

namespace probebench {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', 'S'};

template <typename T>
void put_le(std::vector<std::byte>& out, T value) {
  using U = std::make_unsigned_t<T>;
  auto bits = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::byte>(bits & 0xFFu));
    bits = static_cast<U>(bits >> 8);
  }
}

template <typename T>
T get_le(std::span<const std::byte> bytes, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(std::to_integer<T>(bytes[offset + i]) << (8 * i));
  }
  return value;
}

// n*dim*4 + n*9 + 32, or 0 on overflow.
std::uint64_t checked_size(std::uint64_t n, std::uint64_t dim) noexcept {
  constexpr std::uint64_t kMax = ~std::uint64_t{0};
  if (dim != 0 && n > kMax / dim) return 0;
  const std::uint64_t cells = n * dim;
  if (cells > kMax / 4) return 0;
  if (n > kMax / 9) return 0;
  const std::uint64_t body = cells * 4;
  const std::uint64_t tail = n * 9;
  if (body > kMax - tail - kEmbsHeaderSize) return 0;
  return kEmbsHeaderSize + body + tail;
}

}  // namespace

const char* to_string(Split split) noexcept {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "unknown";
}

EmbeddingDataset::EmbeddingDataset(std::uint32_t dim, std::uint32_t class_count,
                                   std::uint32_t group_count, std::vector<float> embeddings,
                                   std::vector<std::uint32_t> labels,
                                   std::vector<std::uint32_t> groups,
                                   std::vector<std::uint8_t> splits)
    : dim_(dim),
      class_count_(class_count),
      group_count_(group_count),
      embeddings_(std::move(embeddings)),
      labels_(std::move(labels)),
      groups_(std::move(groups)),
      splits_(std::move(splits)) {
  const std::size_t n = labels_.size();
  if (n == 0) throw InvariantError("dataset must contain at least one example");
  if (dim_ == 0) throw InvariantError("dim must be >= 1");
  if (class_count_ < 2) throw InvariantError("class_count must be >= 2");
  if (group_count_ == 0) throw InvariantError("group_count must be >= 1");
  if (groups_.size() != n || splits_.size() != n) {
    throw InvariantError(fmt::format("labels/groups/splits lengths differ ({}/{}/{})", n,
                                     groups_.size(), splits_.size()));
  }
  if (embeddings_.size() != n * dim_) {
    throw InvariantError(
        fmt::format("embedding block has {} values, expected n*dim = {}", embeddings_.size(), n * dim_));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (labels_[i] >= class_count_)
      throw InvariantError(fmt::format("example {}: label {} >= class_count {}", i, labels_[i], class_count_));
    if (groups_[i] >= group_count_)
      throw InvariantError(fmt::format("example {}: group {} >= group_count {}", i, groups_[i], group_count_));
    if (splits_[i] >= kSplitCount)
      throw InvariantError(fmt::format("example {}: split {} is not 0, 1 or 2", i, splits_[i]));
  }
  for (std::size_t k = 0; k < embeddings_.size(); ++k) {
    if (!std::isfinite(embeddings_[k])) {
      throw InvariantError(fmt::format("example {}, component {}: non-finite embedding value", k / dim_, k % dim_));
    }
  }
}

bool operator==(const EmbeddingDataset& a, const EmbeddingDataset& b) noexcept {
  return a.dim_ == b.dim_ && a.class_count_ == b.class_count_ && a.group_count_ == b.group_count_ &&
         a.labels_ == b.labels_ && a.groups_ == b.groups_ && a.splits_ == b.splits_ &&
         a.embeddings_.size() == b.embeddings_.size() &&
         std::memcmp(a.embeddings_.data(), b.embeddings_.data(), a.embeddings_.size() * sizeof(float)) == 0;
}

std::vector<std::string> dataset_warnings(const EmbeddingDataset& dataset) {
  std::vector<std::vector<std::size_t>> per_split(kSplitCount, std::vector<std::size_t>(dataset.class_count(), 0));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    ++per_split[dataset.splits()[i]][dataset.labels()[i]];
  }
  std::vector<std::string> warnings;
  for (int s = 0; s < kSplitCount; ++s) {
    const auto& counts = per_split[s];
    if (std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c == 0; })) continue;
    for (std::uint32_t c = 0; c < dataset.class_count(); ++c) {
      if (counts[c] == 0) {
        warnings.push_back(fmt::format("split {} has no examples of class {}", to_string(static_cast<Split>(s)), c));
      }
    }
  }
  return warnings;
}

SplitView::SplitView(const EmbeddingDataset& dataset, Split split, std::vector<std::size_t> indices)
    : dataset_(&dataset), split_(split), indices_(std::move(indices)) {
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    const std::size_t i = indices_[k];
    if (i >= dataset.size()) throw InvariantError(fmt::format("view index {} out of range", i));
    if (k > 0 && indices_[k - 1] >= i) throw InvariantError("view indices must be strictly increasing");
    if (dataset.splits()[i] != static_cast<std::uint8_t>(split)) {
      throw InvariantError(fmt::format("example {} is not in split {}", i, to_string(split)));
    }
  }
}

SplitView split_view(const EmbeddingDataset& dataset, Split split) {
  std::vector<std::size_t> indices;
  const auto splits = dataset.splits();
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == static_cast<std::uint8_t>(split)) indices.push_back(i);
  }
  return SplitView(dataset, split, std::move(indices));
}

std::uint64_t embs_size(std::uint64_t n, std::uint64_t dim) noexcept { return checked_size(n, dim); }

std::vector<std::byte> encode_embs(const EmbeddingDataset& dataset) {
  const std::uint64_t n = dataset.size();
  std::vector<std::byte> out;
  out.reserve(embs_size(n, dataset.dim()));
  for (char c : kMagic) out.push_back(static_cast<std::byte>(c));
  put_le<std::uint32_t>(out, kEmbsVersion);
  put_le<std::uint64_t>(out, n);
  put_le<std::uint32_t>(out, dataset.dim());
  put_le<std::uint32_t>(out, dataset.class_count());
  put_le<std::uint32_t>(out, dataset.group_count());
  put_le<std::uint32_t>(out, 0);
  for (float v : dataset.embeddings()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  for (auto v : dataset.labels()) put_le<std::uint32_t>(out, v);
  for (auto v : dataset.groups()) put_le<std::uint32_t>(out, v);
  for (auto v : dataset.splits()) out.push_back(static_cast<std::byte>(v));
  return out;
}

void write_embs(const EmbeddingDataset& dataset, std::ostream& sink) {
  const auto bytes = encode_embs(dataset);
  sink.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  sink.flush();
  if (!sink) throw FormatError(FormatErrorKind::kIo, 0, "failed to write EMBS stream");
}

void write_embs_file(const EmbeddingDataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(FormatErrorKind::kIo, 0, "cannot open " + path.string() + " for writing");
  write_embs(dataset, out);
}

EmbeddingDataset decode_embs(std::span<const std::byte> bytes) {
  using K = FormatErrorKind;
  if (bytes.size() < 4) {
    throw FormatError(K::kTruncated, bytes.size(),
                      fmt::format("header needs {} bytes, stream has {}", kEmbsHeaderSize, bytes.size()));
  }
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError(K::kBadMagic, 0, "expected \"EMBS\"");
  if (bytes.size() < kEmbsHeaderSize) {
    throw FormatError(K::kTruncated, bytes.size(),
                      fmt::format("header needs {} bytes, stream has {}", kEmbsHeaderSize, bytes.size()));
  }
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kEmbsVersion) throw FormatError(K::kUnsupportedVersion, 4, fmt::format("version {}", version));
  const auto n = get_le<std::uint64_t>(bytes, 8);
  const auto dim = get_le<std::uint32_t>(bytes, 16);
  const auto class_count = get_le<std::uint32_t>(bytes, 20);
  const auto group_count = get_le<std::uint32_t>(bytes, 24);
  const auto reserved = get_le<std::uint32_t>(bytes, 28);
  if (n == 0) throw FormatError(K::kBadHeader, 8, "n must be >= 1");
  if (dim == 0) throw FormatError(K::kBadHeader, 16, "dim must be >= 1");
  if (class_count < 2) throw FormatError(K::kBadHeader, 20, fmt::format("class_count {} < 2", class_count));
  if (group_count == 0) throw FormatError(K::kBadHeader, 24, "group_count must be >= 1");
  if (reserved != 0) throw FormatError(K::kBadHeader, 28, "reserved field must be 0");

  const std::uint64_t expected = checked_size(n, dim);
  if (expected == 0) throw FormatError(K::kBadHeader, 8, "n*dim overflows");
  if (bytes.size() < expected) {
    const std::uint64_t emb_end = kEmbsHeaderSize + n * dim * 4;
    const char* section = bytes.size() < emb_end                ? "embedding block"
                          : bytes.size() < emb_end + 4 * n      ? "label block"
                          : bytes.size() < emb_end + 8 * n      ? "group block"
                                                                : "split block";
    throw FormatError(K::kTruncated, bytes.size(),
                      fmt::format("{} cut short: expected {} bytes, got {}", section, expected, bytes.size()));
  }
  if (bytes.size() > expected) {
    throw FormatError(K::kBadHeader, expected,
                      fmt::format("{} trailing bytes after split block", bytes.size() - expected));
  }

  std::vector<float> embeddings(n * dim);
  std::size_t off = kEmbsHeaderSize;
  for (std::size_t k = 0; k < embeddings.size(); ++k, off += 4) {
    const float v = std::bit_cast<float>(get_le<std::uint32_t>(bytes, off));
    if (!std::isfinite(v)) {
      throw FormatError(K::kNonFinite, off, fmt::format("example {}, component {}", k / dim, k % dim));
    }
    embeddings[k] = v;
  }
  std::vector<std::uint32_t> labels(n), groups(n);
  std::vector<std::uint8_t> splits(n);
  for (std::size_t i = 0; i < n; ++i, off += 4) {
    labels[i] = get_le<std::uint32_t>(bytes, off);
    if (labels[i] >= class_count) {
      throw FormatError(K::kOutOfRange, off, fmt::format("example {}: label {} >= class_count {}", i, labels[i], class_count));
    }
  }
  for (std::size_t i = 0; i < n; ++i, off += 4) {
    groups[i] = get_le<std::uint32_t>(bytes, off);
    if (groups[i] >= group_count) {
      throw FormatError(K::kOutOfRange, off, fmt::format("example {}: group {} >= group_count {}", i, groups[i], group_count));
    }
  }
  for (std::size_t i = 0; i < n; ++i, off += 1) {
    splits[i] = std::to_integer<std::uint8_t>(bytes[off]);
    if (splits[i] >= kSplitCount) {
      throw FormatError(K::kOutOfRange, off, fmt::format("example {}: split {} not in {{0,1,2}}", i, splits[i]));
    }
  }
  return EmbeddingDataset(dim, class_count, group_count, std::move(embeddings), std::move(labels),
                          std::move(groups), std::move(splits));
}

EmbeddingDataset read_embs(std::istream& source) {
  std::vector<char> raw((std::istreambuf_iterator<char>(source)), std::istreambuf_iterator<char>());
  if (source.bad()) throw FormatError(FormatErrorKind::kIo, raw.size(), "read failure");
  return decode_embs(std::as_bytes(std::span<const char>(raw)));
}

EmbeddingDataset read_embs_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatErrorKind::kIo, 0, "cannot open " + path.string());
  return read_embs(in);
}

std::uint64_t fnv1a64(std::span<const std::byte> bytes) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (std::byte b : bytes) {
    h ^= std::to_integer<std::uint64_t>(b);
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string fingerprint(const EmbeddingDataset& dataset) {
  return fmt::format("{:016x}", fnv1a64(encode_embs(dataset)));
}

}  // namespace probebench
