#include "lcaas/error.hpp"

namespace lcaas {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::chain_sealed: return "chain_sealed";
    case ErrorCode::capacity_exceeded: return "capacity_exceeded";
    case ErrorCode::empty_chain: return "empty_chain";
    case ErrorCode::not_superblock: return "not_superblock";
    case ErrorCode::not_terminal: return "not_terminal";
    case ErrorCode::mining_exhausted: return "mining_exhausted";
    case ErrorCode::corrupt_record: return "corrupt_record";
    case ErrorCode::invalid_ledger: return "invalid_ledger";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::store_raw_disabled: return "store_raw_disabled";
    case ErrorCode::locked: return "locked";
  }
  return "unknown";
}

}  // namespace lcaas
