#include <gtest/gtest.h>

#include <random>

#include "lcaas/block.hpp"
#include "lcaas/error.hpp"
#include "lcaas/hash.hpp"
#include "lcaas/record.hpp"

using namespace lcaas;

namespace {
const std::string kAbc = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad";
}

TEST(CanonicalEncoding, GenesisZeroCase) {
  EXPECT_EQ(canonical_encoding(0, 0, 0, GenesisPayload{}, HexDigest::zero()), "0|0|0|null|" + std::string(64, '0'));
}

TEST(CanonicalEncoding, Deterministic) {
  DataPayload p{compute_hash("x"), LogMeta{"a.log", 1, 2}};
  EXPECT_EQ(canonical_encoding(1, 2, 3, p, HexDigest::zero()), canonical_encoding(1, 2, 3, p, HexDigest::zero()));
}

// Hand-constructed reference string (same as tests/oracles/golden.py).
TEST(CanonicalEncoding, DataPayloadWithoutMeta) {
  const auto prev = HexDigest::from_string(std::string(64, 'f'));
  const auto bytes = canonical_encoding(7, 3, 1500000000, DataPayload{HexDigest::from_string(kAbc), std::nullopt}, prev);
  EXPECT_EQ(bytes, "7|3|1500000000|{\"fields\":{\"digest\":\"" + kAbc + "\"},\"kind\":\"data\"}|" + std::string(64, 'f'));
}

TEST(CanonicalEncoding, MetaKeysSorted) {
  LogMeta meta;
  meta.ts_to = 20;
  meta.file_name = "app.log";
  meta.ts_from = 10;
  EXPECT_EQ(canonical_payload(DataPayload{HexDigest::from_string(kAbc), meta}),
            "{\"fields\":{\"digest\":\"" + kAbc +
                "\",\"meta\":{\"file_name\":\"app.log\",\"ts_from\":10,\"ts_to\":20}},\"kind\":\"data\"}");
}

TEST(CanonicalEncoding, EmptyMetaIsOmitted) {
  EXPECT_EQ(canonical_payload(DataPayload{HexDigest::from_string(kAbc), LogMeta{}}),
            canonical_payload(DataPayload{HexDigest::from_string(kAbc), std::nullopt}));
}

TEST(CanonicalEncoding, TerminalPayload) {
  TerminalPayload t{HexDigest::zero(), 5, 9, 1, 4};
  EXPECT_EQ(canonical_payload(t), "{\"fields\":{\"aggr_hash\":\"" + std::string(64, '0') +
                                      "\",\"block_index_from\":1,\"block_index_to\":4,\"timestamp_from\":5,"
                                      "\"timestamp_to\":9},\"kind\":\"terminal\"}");
}

TEST(CanonicalEncoding, NegativeTimestamp) {
  EXPECT_EQ(canonical_encoding(0, 1, -5, GenesisPayload{}, HexDigest::zero()).substr(0, 9), "0|1|-5|nu");
}

TEST(BlockJson, SuperblockRoundTrip) {
  Block tb{3, 7, 100, BlockKind::terminal, TerminalPayload{compute_hash("a"), 90, 100, 1, 6},
           compute_hash("p"), compute_hash("c")};
  Block sb{11, 0, 101, BlockKind::super, embed_terminal(tb), HexDigest::zero(), compute_hash("s")};
  const auto j = block_to_json(sb);
  EXPECT_EQ(block_from_json(j), sb);
  EXPECT_EQ(unembed_terminal(sb.super_payload()), tb);
}

TEST(BlockJson, StrictParsing) {
  Block b{0, 1, 2, BlockKind::data, DataPayload{compute_hash("x"), std::nullopt}, HexDigest::zero(), compute_hash("y")};
  auto j = block_to_json(b);
  EXPECT_EQ(block_from_json(j), b);

  auto extra = j;
  extra["surprise"] = 1;
  EXPECT_THROW(block_from_json(extra), Error);

  auto wrong_kind = j;
  wrong_kind["kind"] = "terminal";
  EXPECT_THROW(block_from_json(wrong_kind), Error);

  auto upper = j;
  upper["current_hash"] = std::string(64, 'A');
  EXPECT_THROW(block_from_json(upper), Error);

  auto negative = j;
  negative["index"] = -1;
  EXPECT_THROW(block_from_json(negative), Error);

  auto fractional = j;
  fractional["nonce"] = 1.5;
  EXPECT_THROW(block_from_json(fractional), Error);
}

TEST(BlockJson, RejectsInvertedRanges) {
  auto j = block_to_json(Block{0, 1, 2, BlockKind::terminal, TerminalPayload{HexDigest::zero(), 5, 9, 1, 4},
                               HexDigest::zero(), HexDigest::zero()});
  j["data"]["fields"]["block_index_from"] = 5;
  EXPECT_THROW(block_from_json(j), Error);
}

// Property: any block with random field values round-trips through its
// canonical line byte-for-byte.
TEST(LedgerRecord, RandomBlocksRoundTripByteIdentical) {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 300; ++i) {
    Block b;
    b.nonce = rng() % 100000;
    b.index = rng() % 100000;
    b.timestamp = static_cast<std::int64_t>(rng() % 4'000'000'000) - 1'000'000'000;
    b.previous_hash = compute_hash(std::to_string(rng()));
    b.current_hash = compute_hash(std::to_string(rng()));
    Level level = Level::lower;
    switch (rng() % 4) {
      case 0:
        b.kind = BlockKind::relative_genesis;
        b.data = GenesisPayload{};
        break;
      case 1: {
        b.kind = BlockKind::data;
        std::optional<LogMeta> meta;
        if (rng() % 2) meta = LogMeta{"f\"ile\n" + std::to_string(i) + "\xc3\xa9", -3, 7};
        b.data = DataPayload{compute_hash(std::to_string(i)), meta};
        break;
      }
      case 2:
        b.kind = BlockKind::terminal;
        b.data = TerminalPayload{compute_hash("t"), 1, 2, 3, 4};
        break;
      default:
        b.kind = BlockKind::super;
        b.data = SuperPayload{1, 2, 3, TerminalPayload{compute_hash("t"), 1, 2, 3, 4}, HexDigest::zero(), compute_hash("z")};
        level = Level::super;
    }
    LedgerRecord r{"ns-" + std::to_string(i % 3), level, b};
    const std::string line = to_line(r);
    ASSERT_EQ(line.back(), '\n');
    const std::string body = line.substr(0, line.size() - 1);
    EXPECT_EQ(body.find('\n'), std::string::npos);
    const LedgerRecord back = parse_line(body);
    EXPECT_EQ(back, r);
    EXPECT_EQ(to_line(back), line);
  }
}

TEST(LedgerRecord, RejectsNonCanonicalLines) {
  LedgerRecord r{"default", Level::lower,
                 Block{0, 0, 5, BlockKind::absolute_genesis, GenesisPayload{}, HexDigest::zero(), HexDigest::zero()}};
  std::string line = to_line(r);
  line.pop_back();
  EXPECT_NO_THROW(parse_line(line));
  EXPECT_THROW(parse_line(" " + line), Error);
  EXPECT_THROW(parse_line(line.substr(0, line.size() - 3)), Error);
  EXPECT_THROW(parse_line("{}"), Error);
}

TEST(LedgerRecord, NamespaceRules) {
  EXPECT_TRUE(is_valid_namespace("default"));
  EXPECT_TRUE(is_valid_namespace("client_A-1"));
  EXPECT_FALSE(is_valid_namespace(""));
  EXPECT_FALSE(is_valid_namespace("../etc"));
  EXPECT_FALSE(is_valid_namespace("a b"));
  EXPECT_FALSE(is_valid_namespace(std::string(65, 'a')));
}
