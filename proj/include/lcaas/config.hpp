#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>

namespace lcaas {

struct LedgerConfig {
  unsigned difficulty = 2;
  std::size_t max_blocks_per_cb = 10;
  std::int64_t max_open_window_seconds = 3600;
  std::filesystem::path ledger_dir = "ledger";
  bool store_raw = false;

  /// Throws Error(invalid_argument) when a bound is violated.
  void validate() const;
};

inline constexpr std::int64_t kMaxOpenWindowSeconds = 86400;

/// Source of block timestamps, integer Unix epoch seconds.
using Clock = std::function<std::int64_t()>;

Clock system_clock();
Clock fixed_clock(std::int64_t epoch_seconds);

}  // namespace lcaas
