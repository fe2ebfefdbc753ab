#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "attnrank/core.hpp"
#include "attnrank/dump.hpp"
#include "support/test_util.hpp"

namespace attnrank {
namespace {

using testing::make_dump;

std::string error_of(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_dump(bytes);
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

TEST(DumpFormat, MinimalFileLayout) {
  const auto dump = make_dump("q1", {"d0"}, {{0.5f}});
  const auto bytes = encode_dump(dump);
  ASSERT_GE(bytes.size(), 16u);
  EXPECT_EQ(bytes[0], 0x49);
  EXPECT_EQ(bytes[1], 0x43);
  EXPECT_EQ(bytes[2], 0x52);
  EXPECT_EQ(bytes[3], 0x41);
  // version 1, little endian
  EXPECT_EQ(bytes[4], 1);
  EXPECT_EQ(bytes[5], 0);
  EXPECT_EQ(bytes[6], 0);
  EXPECT_EQ(bytes[7], 0);
  const std::uint32_t header_len = bytes[8] | bytes[9] << 8 | bytes[10] << 16 | bytes[11] << 24;
  EXPECT_EQ(bytes.size(), 12 + header_len + 4);
  const std::vector<std::uint8_t> tail(bytes.end() - 4, bytes.end());
  EXPECT_EQ(tail, (std::vector<std::uint8_t>{0x00, 0x00, 0x00, 0x3F}));

  const std::string header(bytes.begin() + 12, bytes.begin() + 12 + header_len);
  for (const char* key : {"\"query_id\"", "\"doc_ids\"", "\"model\"", "\"num_layers\"",
                          "\"num_heads\"", "\"query_token_count\"", "\"doc_token_counts\"",
                          "\"calibration\"", "\"ordering\":\"reversed\""}) {
    EXPECT_NE(header.find(key), std::string::npos) << key;
  }
}

TEST(DumpFormat, PayloadSizeTwoByThree) {
  const auto dump = make_dump("q", {"a", "b", "c"}, {{1, 2, 3}, {4, 5, 6}});
  const auto bytes = encode_dump(dump);
  const std::uint32_t header_len = bytes[8] | bytes[9] << 8 | bytes[10] << 16 | bytes[11] << 24;
  EXPECT_EQ(bytes.size() - 12 - header_len, 24u);
}

TEST(DumpFormat, StreamWriteReportsByteCount) {
  const auto dump = make_dump("q", {"a", "b"}, {{1, 2}});
  std::ostringstream out;
  const std::size_t n = write_dump(dump, out);
  EXPECT_EQ(n, out.str().size());
  std::istringstream in(out.str());
  EXPECT_EQ(read_dump(in), dump);
}

TEST(DumpFormat, RoundTripRandomDumps) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto dump = testing::random_dump(rng, i % 2 == 0);
    const auto bytes = encode_dump(dump);
    const auto back = decode_dump(bytes);
    ASSERT_EQ(back, dump);
    ASSERT_EQ(encode_dump(back), bytes);
  }
}

TEST(DumpFormat, BadMagic) {
  auto bytes = encode_dump(make_dump("q", {"a"}, {{1}}));
  bytes[0] = 'X';
  bytes[1] = 'X';
  bytes[2] = 'X';
  bytes[3] = 'X';
  EXPECT_EQ(error_of(bytes), "not an ICRA file");
  EXPECT_EQ(error_of({}), "not an ICRA file");
}

TEST(DumpFormat, BadVersion) {
  auto bytes = encode_dump(make_dump("q", {"a"}, {{1}}));
  bytes[4] = 2;
  EXPECT_NE(error_of(bytes).find("unsupported version"), std::string::npos);
}

TEST(DumpFormat, TruncatedPayload) {
  auto bytes = encode_dump(make_dump("q", {"a", "b"}, {{1, 2}}));
  bytes.pop_back();
  EXPECT_EQ(error_of(bytes), "truncated payload");
}

TEST(DumpFormat, TrailingBytes) {
  auto bytes = encode_dump(make_dump("q", {"a"}, {{1}}));
  bytes.push_back(0);
  EXPECT_NE(error_of(bytes).find("trailing"), std::string::npos);
}

TEST(DumpFormat, MalformedHeader) {
  auto bytes = encode_dump(make_dump("q", {"a"}, {{1}}));
  bytes[12] = '[';
  EXPECT_NE(error_of(bytes).find("JSON"), std::string::npos);
}

TEST(DumpFormat, NegativeEntryRejectedOnRead) {
  auto dump = make_dump("q", {"a"}, {{1}});
  auto bytes = encode_dump(dump);
  // flip the sign bit of the only payload value
  bytes.back() |= 0x80;
  EXPECT_NE(error_of(bytes).find("negative"), std::string::npos);
}

TEST(DumpFormat, MassBoundRejected) {
  // 1 head x 1 query token: a layer may hold at most 1.0 in total
  auto dump = make_dump("q", {"a", "b"}, {{0.6f, 0.6f}}, false, 1, 1);
  EXPECT_THROW(encode_dump(dump), FormatError);
  dump.matrix = {0.5f, 0.5f};
  EXPECT_NO_THROW(encode_dump(dump));
}

TEST(DumpFormat, RefusesInconsistentShapes) {
  auto dump = make_dump("q", {"a", "b"}, {{0.1f, 0.1f}});
  dump.doc_token_counts.pop_back();
  EXPECT_THROW(encode_dump(dump), FormatError);
  dump = make_dump("q", {"a", "b"}, {{0.1f, 0.1f}});
  dump.matrix.push_back(0.1f);
  EXPECT_THROW(encode_dump(dump), FormatError);
}

TEST(ValidatePair, AcceptsMatchingPair) {
  const auto real = make_dump("q", {"a", "b"}, {{1, 2}}, false);
  const auto null = make_dump("q", {"a", "b"}, {{1, 1}}, true);
  EXPECT_NO_THROW(validate_pair(real, null));
}

TEST(ValidatePair, DetectsMismatches) {
  const auto real = make_dump("q", {"a", "b"}, {{1, 2}}, false);
  auto expect_error = [&](const AttentionDump& null, const std::string& msg) {
    try {
      validate_pair(real, null);
      ADD_FAILURE() << "expected " << msg;
    } catch (const Error& e) {
      EXPECT_EQ(std::string(e.what()), msg);
    }
  };
  expect_error(make_dump("q", {"b", "a"}, {{1, 2}}, true), "doc_ids mismatch");
  expect_error(make_dump("q", {"a", "b"}, {{1, 2}, {1, 2}}, true), "num_layers mismatch");
  expect_error(make_dump("q", {"a", "b"}, {{1, 2}}, false), "null dump not flagged");
  EXPECT_THROW(validate_pair(make_dump("q", {"a", "b"}, {{1, 2}}, true),
                             make_dump("q", {"a", "b"}, {{1, 2}}, true)),
               Error);
}

}  // namespace
}  // namespace attnrank
