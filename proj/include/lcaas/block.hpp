#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "lcaas/hex_digest.hpp"

namespace lcaas {

enum class BlockKind { absolute_genesis, relative_genesis, data, terminal, super };

std::string_view to_string(BlockKind kind) noexcept;
std::optional<BlockKind> parse_block_kind(std::string_view text) noexcept;

/// Optional log metadata supplied at submission time.
struct LogMeta {
  std::optional<std::string> file_name;
  std::optional<std::int64_t> ts_from;
  std::optional<std::int64_t> ts_to;

  bool empty() const noexcept { return !file_name && !ts_from && !ts_to; }
  /// ts_from <= ts_to whenever both are present.
  bool well_formed() const noexcept { return !(ts_from && ts_to && *ts_from > *ts_to); }
  /// Record-time interval, a point if only one bound is present.
  std::optional<std::pair<std::int64_t, std::int64_t>> record_interval() const noexcept;

  friend bool operator==(const LogMeta&, const LogMeta&) = default;
};

struct GenesisPayload {
  friend bool operator==(const GenesisPayload&, const GenesisPayload&) = default;
};

struct DataPayload {
  HexDigest digest;
  std::optional<LogMeta> meta;  // never holds an empty LogMeta

  friend bool operator==(const DataPayload&, const DataPayload&) = default;
};

struct TerminalPayload {
  HexDigest aggr_hash;
  std::int64_t timestamp_from = 0;
  std::int64_t timestamp_to = 0;
  std::uint64_t block_index_from = 0;
  std::uint64_t block_index_to = 0;

  friend bool operator==(const TerminalPayload&, const TerminalPayload&) = default;
};

/// Verbatim copy of the six fields of one terminal block.
struct SuperPayload {
  std::uint64_t nonce = 0;
  std::uint64_t index = 0;
  std::int64_t timestamp = 0;
  TerminalPayload data;
  HexDigest previous_hash;
  HexDigest current_hash;

  friend bool operator==(const SuperPayload&, const SuperPayload&) = default;
};

using BlockPayload = std::variant<GenesisPayload, DataPayload, TerminalPayload, SuperPayload>;

struct Block {
  std::uint64_t nonce = 0;
  std::uint64_t index = 0;
  std::int64_t timestamp = 0;
  BlockKind kind = BlockKind::data;
  BlockPayload data;
  HexDigest previous_hash;
  HexDigest current_hash;

  bool is_genesis() const noexcept {
    return kind == BlockKind::absolute_genesis || kind == BlockKind::relative_genesis;
  }
  bool is_mined() const noexcept { return !is_genesis(); }

  const DataPayload& data_payload() const { return std::get<DataPayload>(data); }
  const TerminalPayload& terminal_payload() const { return std::get<TerminalPayload>(data); }
  const SuperPayload& super_payload() const { return std::get<SuperPayload>(data); }

  friend bool operator==(const Block&, const Block&) = default;
};

/// True when the block kind agrees with the payload alternative.
bool kind_matches_payload(const Block& b) noexcept;

SuperPayload embed_terminal(const Block& tb);
Block unembed_terminal(const SuperPayload& p);

// Canonical JSON. Objects are key-sorted and compact when dumped; the genesis
// payload is JSON null and every other payload is {"fields":{...},"kind":...}.
nlohmann::json payload_to_json(const BlockPayload& payload);
BlockPayload payload_from_json(const nlohmann::json& j);
std::string canonical_payload(const BlockPayload& payload);

nlohmann::json block_to_json(const Block& b);
/// Strict: unknown keys, wrong types or invalid digests raise Error(invalid_argument).
Block block_from_json(const nlohmann::json& j);

/// decimal(nonce)|decimal(index)|decimal(timestamp)|payload|previous_hash
std::string canonical_encoding(std::uint64_t nonce, std::uint64_t index, std::int64_t timestamp,
                               const BlockPayload& payload, const HexDigest& previous_hash);
std::string canonical_encoding(const Block& b);

/// Everything after the nonce, starting with the '|' separator. Mining reuses
/// this across nonce candidates.
std::string canonical_encoding_tail(std::uint64_t index, std::int64_t timestamp,
                                    const BlockPayload& payload, const HexDigest& previous_hash);

}  // namespace lcaas
