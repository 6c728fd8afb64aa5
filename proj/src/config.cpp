#include "lcaas/config.hpp"

#include <chrono>

#include "lcaas/error.hpp"
#include "lcaas/mining.hpp"

namespace lcaas {

void LedgerConfig::validate() const {
  if (difficulty > kMaxDifficulty) {
    throw Error(ErrorCode::invalid_argument,
                "difficulty must be at most " + std::to_string(kMaxDifficulty));
  }
  if (max_blocks_per_cb == 0) {
    throw Error(ErrorCode::invalid_argument, "max_blocks_per_cb must be positive");
  }
  if (max_open_window_seconds <= 0 || max_open_window_seconds > kMaxOpenWindowSeconds) {
    throw Error(ErrorCode::invalid_argument,
                "max_open_window_seconds must be in [1, " + std::to_string(kMaxOpenWindowSeconds) + "]");
  }
}

Clock system_clock() {
  return [] {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

Clock fixed_clock(std::int64_t epoch_seconds) {
  return [epoch_seconds] { return epoch_seconds; };
}

}  // namespace lcaas
