#pragma once

#include <cstdint>

#include "lcaas/block.hpp"

namespace lcaas {

inline constexpr unsigned kMaxDifficulty = 8;
inline constexpr std::uint64_t kMaxNonce = std::uint64_t{1} << 32;

struct MiningResult {
  std::uint64_t nonce = 0;
  HexDigest current_hash;
};

/// Searches nonce = 0, 1, 2, ... and returns the first whose block hash has
/// `difficulty` leading zeros. Throws Error(mining_exhausted) past `nonce_limit`.
MiningResult mine_block(std::uint64_t index, std::int64_t timestamp, const BlockPayload& payload,
                        const HexDigest& previous_hash, unsigned difficulty,
                        std::uint64_t nonce_limit = kMaxNonce);

/// Fills in nonce and current_hash of a block whose other fields are set.
void mine_into(Block& b, unsigned difficulty);

}  // namespace lcaas
