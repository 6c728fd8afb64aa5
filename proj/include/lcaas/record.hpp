#pragma once

#include <string>
#include <string_view>

#include "lcaas/chain.hpp"

namespace lcaas {

/// One line of <namespace>.ledger.jsonl.
struct LedgerRecord {
  std::string name_space;
  Level level = Level::lower;
  Block block;

  friend bool operator==(const LedgerRecord&, const LedgerRecord&) = default;
};

/// Canonical JSON followed by '\n'.
std::string to_line(const LedgerRecord& r);

/// Parses one line without its terminating '\n'. Rejects anything that does
/// not re-serialize to exactly the same bytes. Throws Error(invalid_argument).
LedgerRecord parse_line(std::string_view line);

/// [A-Za-z0-9_-]{1,64}
bool is_valid_namespace(std::string_view ns) noexcept;

std::string ledger_file_name(std::string_view ns);

}  // namespace lcaas
