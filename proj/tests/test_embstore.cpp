#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <set>
#include <sstream>

#include "probebench/embstore.hpp"
#include "probebench/errors.hpp"
#include "probebench/synthgen.hpp"
#include "test_support.hpp"

using namespace probebench;

namespace {

EmbeddingDataset minimal() { return EmbeddingDataset(1, 2, 1, {0.0f}, {0}, {0}, {0}); }

std::vector<std::byte> bytes_of(const EmbeddingDataset& ds) { return encode_embs(ds); }

void put_u32(std::vector<std::byte>& b, std::size_t off, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b[off + i] = static_cast<std::byte>((v >> (8 * i)) & 0xFF);
}

FormatError decode_error(std::span<const std::byte> bytes) {
  try {
    decode_embs(bytes);
  } catch (const FormatError& e) {
    return e;
  }
  FAIL("expected a FormatError");
  throw;
}

}  // namespace

TEST_CASE("minimal dataset encodes to header plus 13 payload bytes") {
  const auto ds = minimal();
  const auto b = bytes_of(ds);
  CHECK(b.size() == 45);
  CHECK(embs_size(1, 1) == 45);
  CHECK(std::memcmp(b.data(), "EMBS", 4) == 0);
  CHECK(std::to_integer<int>(b[4]) == 1);  // version, little-endian
  CHECK(std::to_integer<int>(b[8]) == 1);  // n
  CHECK(decode_embs(b) == ds);

  std::stringstream stream;
  write_embs(ds, stream);
  CHECK(stream.str().size() == 45);
  CHECK(read_embs(stream) == ds);
}

TEST_CASE("synthetic Waterbirds-analog file size follows the layout") {
  synth::SynthSpec spec;
  spec.dim = 16;
  const auto ds = synth::generate(spec);
  REQUIRE(ds.size() == 4795 + 1199 + 5794);
  CHECK(bytes_of(ds).size() == 32 + 11788ULL * 16 * 4 + 11788ULL * (4 + 4 + 1));
}

TEST_CASE("non-finite embeddings never reach the writer") {
  CHECK_THROWS_AS(EmbeddingDataset(1, 2, 1, {std::numeric_limits<float>::quiet_NaN()}, {0}, {0}, {0}),
                  InvariantError);
  CHECK_THROWS_AS(EmbeddingDataset(1, 2, 1, {std::numeric_limits<float>::infinity()}, {0}, {0}, {0}),
                  InvariantError);
}

TEST_CASE("dataset invariants are enforced at construction") {
  CHECK_THROWS_AS(EmbeddingDataset(1, 2, 1, {}, {}, {}, {}), InvariantError);
  CHECK_THROWS_AS(EmbeddingDataset(0, 2, 1, {}, {0}, {0}, {0}), InvariantError);
  CHECK_THROWS_AS(EmbeddingDataset(1, 1, 1, {0.f}, {0}, {0}, {0}), InvariantError);
  CHECK_THROWS_AS(EmbeddingDataset(1, 2, 1, {0.f}, {2}, {0}, {0}), InvariantError);
  CHECK_THROWS_AS(EmbeddingDataset(1, 2, 1, {0.f}, {0}, {1}, {0}), InvariantError);
  CHECK_THROWS_AS(EmbeddingDataset(1, 2, 1, {0.f}, {0}, {0}, {3}), InvariantError);
  CHECK_THROWS_AS(EmbeddingDataset(2, 2, 1, {0.f}, {0}, {0}, {0}), InvariantError);
  CHECK_THROWS_AS(EmbeddingDataset(1, 2, 1, {0.f}, {0}, {0, 0}, {0}), InvariantError);
}

TEST_CASE("write then read is the identity on random datasets") {
  rng::Xoshiro256 gen(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen.below(64);
    const auto dim = static_cast<std::uint32_t>(1 + gen.below(32));
    const auto classes = static_cast<std::uint32_t>(2 + gen.below(3));
    const auto groups = static_cast<std::uint32_t>(1 + gen.below(6));
    const auto ds = testing::random_dataset(gen(), n, dim, classes, groups);
    const auto bytes = bytes_of(ds);
    REQUIRE(bytes.size() == embs_size(n, dim));
    const auto back = decode_embs(bytes);
    REQUIRE(back == ds);
    CHECK(bytes_of(back) == bytes);
  }
}

TEST_CASE("decoder names the failing field and offset") {
  const auto ds = testing::random_dataset(5, 10, 3);
  const auto good = bytes_of(ds);

  SUBCASE("bad magic") {
    auto b = good;
    std::memcpy(b.data(), "XXXX", 4);
    const auto e = decode_error(b);
    CHECK(e.kind() == FormatErrorKind::kBadMagic);
    CHECK(e.offset() == 0);
  }
  SUBCASE("unsupported version") {
    auto b = good;
    put_u32(b, 4, 2);
    const auto e = decode_error(b);
    CHECK(e.kind() == FormatErrorKind::kUnsupportedVersion);
    CHECK(e.offset() == 4);
  }
  SUBCASE("truncated inside the embedding block") {
    // 32-byte header, then 10*3 floats; cut halfway through example 4.
    const std::size_t cut = 32 + 4 * (3 * 4 + 1) + 2;
    const auto e = decode_error(std::span(good).first(cut));
    CHECK(e.kind() == FormatErrorKind::kTruncated);
    CHECK(e.offset() == cut);
    const std::string msg = e.what();
    CHECK(msg.find("embedding block") != std::string::npos);
    CHECK(msg.find("expected " + std::to_string(good.size())) != std::string::npos);
    CHECK(msg.find("got " + std::to_string(cut)) != std::string::npos);
  }
  SUBCASE("truncated header") {
    const auto e = decode_error(std::span(good).first(20));
    CHECK(e.kind() == FormatErrorKind::kTruncated);
  }
  SUBCASE("trailing bytes") {
    auto b = good;
    b.push_back(std::byte{0});
    CHECK(decode_error(b).kind() == FormatErrorKind::kBadHeader);
  }
  SUBCASE("label out of range") {
    auto b = good;
    const std::size_t label_off = 32 + 10 * 3 * 4 + 4 * 7;
    put_u32(b, label_off, 2);
    const auto e = decode_error(b);
    CHECK(e.kind() == FormatErrorKind::kOutOfRange);
    CHECK(e.offset() == label_off);
    CHECK(std::string(e.what()).find("example 7") != std::string::npos);
  }
  SUBCASE("group out of range") {
    auto b = good;
    const std::size_t group_off = 32 + 10 * 3 * 4 + 40 + 4 * 9;
    put_u32(b, group_off, 4);
    const auto e = decode_error(b);
    CHECK(e.kind() == FormatErrorKind::kOutOfRange);
    CHECK(e.offset() == group_off);
    CHECK(std::string(e.what()).find("example 9") != std::string::npos);
  }
  SUBCASE("split out of range") {
    auto b = good;
    b[b.size() - 1] = std::byte{3};
    CHECK(decode_error(b).kind() == FormatErrorKind::kOutOfRange);
  }
  SUBCASE("NaN embedding") {
    auto b = good;
    put_u32(b, 32 + 4 * 5, 0x7FC00000u);
    const auto e = decode_error(b);
    CHECK(e.kind() == FormatErrorKind::kNonFinite);
    CHECK(e.offset() == 32 + 4 * 5);
  }
  SUBCASE("nonzero reserved word") {
    auto b = good;
    put_u32(b, 28, 1);
    CHECK(decode_error(b).kind() == FormatErrorKind::kBadHeader);
  }
  SUBCASE("overflowing n") {
    auto b = good;
    for (int i = 8; i < 16; ++i) b[i] = std::byte{0xFF};
    CHECK(decode_error(b).kind() == FormatErrorKind::kBadHeader);
  }
}

TEST_CASE("mutated streams parse to valid datasets or raise FormatError") {
  const auto good = bytes_of(testing::random_dataset(11, 6, 2, 3, 3));
  rng::Xoshiro256 gen(3);
  int parsed = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    auto b = good;
    const int flips = 1 + static_cast<int>(gen.below(4));
    for (int k = 0; k < flips; ++k) b[gen.below(b.size())] = static_cast<std::byte>(gen.below(256));
    if (gen.below(8) == 0) b.resize(gen.below(b.size() + 1));
    try {
      const auto ds = decode_embs(b);
      ++parsed;
      // Re-validate through the constructor.
      EmbeddingDataset copy(ds.dim(), ds.class_count(), ds.group_count(),
                            std::vector<float>(ds.embeddings().begin(), ds.embeddings().end()),
                            std::vector<std::uint32_t>(ds.labels().begin(), ds.labels().end()),
                            std::vector<std::uint32_t>(ds.groups().begin(), ds.groups().end()),
                            std::vector<std::uint8_t>(ds.splits().begin(), ds.splits().end()));
      CHECK(copy == ds);
    } catch (const FormatError&) {
    }
  }
  CHECK(parsed > 0);
}

TEST_CASE("split views partition the dataset in file order") {
  const auto ds = testing::random_dataset(17, 300, 4);
  std::set<std::size_t> seen;
  std::size_t total = 0;
  for (int s = 0; s < kSplitCount; ++s) {
    const auto view = split_view(ds, static_cast<Split>(s));
    for (std::size_t k = 0; k < view.size(); ++k) {
      if (k > 0) CHECK(view.indices()[k - 1] < view.indices()[k]);
      CHECK(ds.splits()[view.indices()[k]] == s);
      seen.insert(view.indices()[k]);
    }
    total += view.size();
  }
  CHECK(total == ds.size());
  CHECK(seen.size() == ds.size());
}

TEST_CASE("split views over the default synthetic dataset") {
  synth::SynthSpec spec;
  spec.dim = 4;
  const auto ds = synth::generate(spec);
  CHECK(split_view(ds, Split::kTrain).size() == 4795);
  const auto val = split_view(ds, Split::kValidation);
  CHECK(val.size() == 1199);
  std::array<std::size_t, 4> by_slot{};
  for (std::size_t k = 0; k < val.size(); ++k) ++by_slot[3 - val.group(k)];
  CHECK(by_slot == std::array<std::size_t, 4>{467, 466, 133, 133});
  CHECK(split_view(ds, Split::kTest).size() == 5794);
}

TEST_CASE("empty split gives an empty view") {
  const EmbeddingDataset ds(1, 2, 1, {1.f, 2.f}, {0, 1}, {0, 0}, {0, 1});
  CHECK(split_view(ds, Split::kTest).empty());
}

TEST_CASE("SplitView rejects bad index lists") {
  const EmbeddingDataset ds(1, 2, 1, {1.f, 2.f, 3.f}, {0, 1, 0}, {0, 0, 0}, {0, 0, 1});
  CHECK_NOTHROW(SplitView(ds, Split::kTrain, {0, 1}));
  CHECK_THROWS_AS(SplitView(ds, Split::kTrain, {1, 0}), InvariantError);
  CHECK_THROWS_AS(SplitView(ds, Split::kTrain, {0, 0}), InvariantError);
  CHECK_THROWS_AS(SplitView(ds, Split::kTrain, {0, 2}), InvariantError);
  CHECK_THROWS_AS(SplitView(ds, Split::kTrain, {5}), InvariantError);
}

TEST_CASE("missing classes in a present split are warnings") {
  const EmbeddingDataset ds(1, 2, 1, {1.f, 2.f, 3.f}, {0, 1, 0}, {0, 0, 0}, {0, 0, 1});
  const auto w = dataset_warnings(ds);
  REQUIRE(w.size() == 1);
  CHECK(w[0] == "split validation has no examples of class 1");
}

TEST_CASE("fingerprint is content-addressed") {
  const auto a = testing::random_dataset(1, 20, 3);
  const auto b = testing::random_dataset(1, 20, 3);
  const auto c = testing::random_dataset(2, 20, 3);
  CHECK(fingerprint(a) == fingerprint(b));
  CHECK(fingerprint(a) != fingerprint(c));
  CHECK(fingerprint(a).size() == 16);
  // FNV-1a of the empty string.
  CHECK(fnv1a64({}) == 0xCBF29CE484222325ULL);
}
