#include "lcaas/record.hpp"

#include <algorithm>

#include "lcaas/error.hpp"

namespace lcaas {

using nlohmann::json;

namespace {

json record_json(const LedgerRecord& r) {
  return {{"block", block_to_json(r.block)}, {"level", to_string(r.level)}, {"namespace", r.name_space}};
}

}  // namespace

bool is_valid_namespace(std::string_view ns) noexcept {
  return !ns.empty() && ns.size() <= 64 && std::all_of(ns.begin(), ns.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  });
}

std::string ledger_file_name(std::string_view ns) { return std::string(ns) + ".ledger.jsonl"; }

std::string to_line(const LedgerRecord& r) { return record_json(r).dump() + '\n'; }

LedgerRecord parse_line(std::string_view line) {
  json j = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw Error(ErrorCode::invalid_argument, "not valid JSON");
  if (!j.is_object() || j.size() != 3 || !j.contains("block") || !j.contains("level") ||
      !j.contains("namespace")) {
    throw Error(ErrorCode::invalid_argument, "record must have exactly block, level and namespace");
  }
  LedgerRecord r;
  if (j["level"] == "lower") {
    r.level = Level::lower;
  } else if (j["level"] == "super") {
    r.level = Level::super;
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown level");
  }
  if (!j["namespace"].is_string() || !is_valid_namespace(j["namespace"].get_ref<const std::string&>())) {
    throw Error(ErrorCode::invalid_argument, "invalid namespace");
  }
  r.name_space = j["namespace"].get<std::string>();
  r.block = block_from_json(j["block"]);
  if ((r.level == Level::super) != (r.block.kind == BlockKind::super)) {
    throw Error(ErrorCode::invalid_argument, "level does not match block kind");
  }
  if (record_json(r).dump() != line) {
    throw Error(ErrorCode::invalid_argument, "record is not in canonical form");
  }
  return r;
}

}  // namespace lcaas
