#include "lcaas/block.hpp"

#include <initializer_list>

#include "lcaas/error.hpp"

namespace lcaas {

using nlohmann::json;

namespace {

[[noreturn]] void reject(const std::string& what) {
  throw Error(ErrorCode::invalid_argument, what);
}

void expect_object(const json& j, std::string_view what) {
  if (!j.is_object()) reject(std::string(what) + " must be an object");
}

void expect_keys(const json& j, std::string_view what, std::initializer_list<std::string_view> required,
                 std::initializer_list<std::string_view> optional = {}) {
  expect_object(j, what);
  for (auto key : required) {
    if (!j.contains(key)) reject(std::string(what) + " is missing \"" + std::string(key) + "\"");
  }
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (auto k : required) known = known || k == key;
    for (auto k : optional) known = known || k == key;
    if (!known) reject(std::string(what) + " has unknown field \"" + key + "\"");
  }
}

std::uint64_t get_u64(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number_unsigned()) {
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
    reject(std::string("\"") + key + "\" must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::int64_t get_i64(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) reject(std::string("\"") + key + "\" must be an integer");
  if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
    reject(std::string("\"") + key + "\" is out of range");
  }
  return v.get<std::int64_t>();
}

HexDigest get_digest(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_string()) reject(std::string("\"") + key + "\" must be a string");
  auto d = HexDigest::parse(v.get_ref<const std::string&>());
  if (!d) reject(std::string("\"") + key + "\" is not a 64-character lowercase hex digest");
  return *d;
}

json terminal_fields(const TerminalPayload& t) {
  return {{"aggr_hash", t.aggr_hash.str()},
          {"block_index_from", t.block_index_from},
          {"block_index_to", t.block_index_to},
          {"timestamp_from", t.timestamp_from},
          {"timestamp_to", t.timestamp_to}};
}

TerminalPayload terminal_from_fields(const json& f) {
  expect_keys(f, "terminal fields",
              {"aggr_hash", "block_index_from", "block_index_to", "timestamp_from", "timestamp_to"});
  TerminalPayload t;
  t.aggr_hash = get_digest(f, "aggr_hash");
  t.block_index_from = get_u64(f, "block_index_from");
  t.block_index_to = get_u64(f, "block_index_to");
  t.timestamp_from = get_i64(f, "timestamp_from");
  t.timestamp_to = get_i64(f, "timestamp_to");
  if (t.block_index_from > t.block_index_to) reject("block_index_from exceeds block_index_to");
  if (t.timestamp_from > t.timestamp_to) reject("timestamp_from exceeds timestamp_to");
  return t;
}

json tagged(std::string_view kind, json fields) {
  return {{"fields", std::move(fields)}, {"kind", kind}};
}

}  // namespace

std::string_view to_string(BlockKind kind) noexcept {
  switch (kind) {
    case BlockKind::absolute_genesis: return "absolute_genesis";
    case BlockKind::relative_genesis: return "relative_genesis";
    case BlockKind::data: return "data";
    case BlockKind::terminal: return "terminal";
    case BlockKind::super: return "super";
  }
  return "unknown";
}

std::optional<BlockKind> parse_block_kind(std::string_view text) noexcept {
  for (auto k : {BlockKind::absolute_genesis, BlockKind::relative_genesis, BlockKind::data,
                 BlockKind::terminal, BlockKind::super}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::optional<std::pair<std::int64_t, std::int64_t>> LogMeta::record_interval() const noexcept {
  if (ts_from && ts_to) return std::pair{*ts_from, *ts_to};
  if (ts_from) return std::pair{*ts_from, *ts_from};
  if (ts_to) return std::pair{*ts_to, *ts_to};
  return std::nullopt;
}

bool kind_matches_payload(const Block& b) noexcept {
  switch (b.kind) {
    case BlockKind::absolute_genesis:
    case BlockKind::relative_genesis: return std::holds_alternative<GenesisPayload>(b.data);
    case BlockKind::data: return std::holds_alternative<DataPayload>(b.data);
    case BlockKind::terminal: return std::holds_alternative<TerminalPayload>(b.data);
    case BlockKind::super: return std::holds_alternative<SuperPayload>(b.data);
  }
  return false;
}

SuperPayload embed_terminal(const Block& tb) {
  if (tb.kind != BlockKind::terminal || !kind_matches_payload(tb)) {
    throw Error(ErrorCode::not_terminal, "block " + std::to_string(tb.index) + " is not a terminal block");
  }
  return SuperPayload{tb.nonce, tb.index, tb.timestamp, tb.terminal_payload(), tb.previous_hash,
                      tb.current_hash};
}

Block unembed_terminal(const SuperPayload& p) {
  return Block{p.nonce, p.index, p.timestamp, BlockKind::terminal, p.data, p.previous_hash,
               p.current_hash};
}

json payload_to_json(const BlockPayload& payload) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GenesisPayload>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, DataPayload>) {
          json fields = {{"digest", p.digest.str()}};
          if (p.meta && !p.meta->empty()) {
            json meta = json::object();
            if (p.meta->file_name) meta["file_name"] = *p.meta->file_name;
            if (p.meta->ts_from) meta["ts_from"] = *p.meta->ts_from;
            if (p.meta->ts_to) meta["ts_to"] = *p.meta->ts_to;
            fields["meta"] = std::move(meta);
          }
          return tagged("data", std::move(fields));
        } else if constexpr (std::is_same_v<T, TerminalPayload>) {
          return tagged("terminal", terminal_fields(p));
        } else {
          return tagged("super", {{"current_hash", p.current_hash.str()},
                                  {"data", tagged("terminal", terminal_fields(p.data))},
                                  {"index", p.index},
                                  {"nonce", p.nonce},
                                  {"previous_hash", p.previous_hash.str()},
                                  {"timestamp", p.timestamp}});
        }
      },
      payload);
}

BlockPayload payload_from_json(const json& j) {
  if (j.is_null()) return GenesisPayload{};
  expect_keys(j, "payload", {"fields", "kind"});
  if (!j.at("kind").is_string()) reject("payload kind must be a string");
  const auto& kind = j.at("kind").get_ref<const std::string&>();
  const json& f = j.at("fields");

  if (kind == "data") {
    expect_keys(f, "data fields", {"digest"}, {"meta"});
    DataPayload p{get_digest(f, "digest"), std::nullopt};
    if (f.contains("meta")) {
      const json& m = f.at("meta");
      expect_keys(m, "meta", {}, {"file_name", "ts_from", "ts_to"});
      LogMeta meta;
      if (m.contains("file_name")) {
        if (!m.at("file_name").is_string()) reject("meta.file_name must be a string");
        meta.file_name = m.at("file_name").get<std::string>();
      }
      if (m.contains("ts_from")) meta.ts_from = get_i64(m, "ts_from");
      if (m.contains("ts_to")) meta.ts_to = get_i64(m, "ts_to");
      if (meta.empty()) reject("meta must not be empty");
      if (!meta.well_formed()) reject("meta.ts_from exceeds meta.ts_to");
      p.meta = std::move(meta);
    }
    return p;
  }
  if (kind == "terminal") return terminal_from_fields(f);
  if (kind == "super") {
    expect_keys(f, "super fields", {"current_hash", "data", "index", "nonce", "previous_hash", "timestamp"});
    SuperPayload p;
    p.current_hash = get_digest(f, "current_hash");
    const json& inner = f.at("data");
    expect_keys(inner, "embedded terminal payload", {"fields", "kind"});
    if (inner.at("kind") != "terminal") reject("superblock must embed a terminal payload");
    p.data = terminal_from_fields(inner.at("fields"));
    p.index = get_u64(f, "index");
    p.nonce = get_u64(f, "nonce");
    p.previous_hash = get_digest(f, "previous_hash");
    p.timestamp = get_i64(f, "timestamp");
    return p;
  }
  reject("unknown payload kind \"" + kind + "\"");
}

std::string canonical_payload(const BlockPayload& payload) { return payload_to_json(payload).dump(); }

json block_to_json(const Block& b) {
  return {{"current_hash", b.current_hash.str()},
          {"data", payload_to_json(b.data)},
          {"index", b.index},
          {"kind", to_string(b.kind)},
          {"nonce", b.nonce},
          {"previous_hash", b.previous_hash.str()},
          {"timestamp", b.timestamp}};
}

Block block_from_json(const json& j) {
  expect_keys(j, "block", {"current_hash", "data", "index", "kind", "nonce", "previous_hash", "timestamp"});
  Block b;
  if (!j.at("kind").is_string()) reject("block kind must be a string");
  auto kind = parse_block_kind(j.at("kind").get_ref<const std::string&>());
  if (!kind) reject("unknown block kind");
  b.kind = *kind;
  b.nonce = get_u64(j, "nonce");
  b.index = get_u64(j, "index");
  b.timestamp = get_i64(j, "timestamp");
  b.data = payload_from_json(j.at("data"));
  b.previous_hash = get_digest(j, "previous_hash");
  b.current_hash = get_digest(j, "current_hash");
  if (!kind_matches_payload(b)) reject("block kind does not match its payload");
  return b;
}

std::string canonical_encoding_tail(std::uint64_t index, std::int64_t timestamp,
                                    const BlockPayload& payload, const HexDigest& previous_hash) {
  std::string out;
  out += '|';
  out += std::to_string(index);
  out += '|';
  out += std::to_string(timestamp);
  out += '|';
  out += canonical_payload(payload);
  out += '|';
  out += previous_hash.str();
  return out;
}

std::string canonical_encoding(std::uint64_t nonce, std::uint64_t index, std::int64_t timestamp,
                               const BlockPayload& payload, const HexDigest& previous_hash) {
  return std::to_string(nonce) + canonical_encoding_tail(index, timestamp, payload, previous_hash);
}

std::string canonical_encoding(const Block& b) {
  return canonical_encoding(b.nonce, b.index, b.timestamp, b.data, b.previous_hash);
}

}  // namespace lcaas
