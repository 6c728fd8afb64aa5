#include "lcaas/mining.hpp"

#include "lcaas/error.hpp"
#include "lcaas/hash.hpp"

namespace lcaas {

MiningResult mine_block(std::uint64_t index, std::int64_t timestamp, const BlockPayload& payload,
                        const HexDigest& previous_hash, unsigned difficulty,
                        std::uint64_t nonce_limit) {
  if (difficulty > kMaxDifficulty) {
    throw Error(ErrorCode::invalid_argument,
                "difficulty " + std::to_string(difficulty) + " exceeds " + std::to_string(kMaxDifficulty));
  }
  const std::string tail = canonical_encoding_tail(index, timestamp, payload, previous_hash);
  std::string candidate;
  for (std::uint64_t nonce = 0; nonce <= nonce_limit; ++nonce) {
    candidate = std::to_string(nonce);
    candidate += tail;
    HexDigest h = compute_hash(candidate);
    if (meets_difficulty(h, difficulty)) return {nonce, std::move(h)};
  }
  throw Error(ErrorCode::mining_exhausted,
              "no nonce up to " + std::to_string(nonce_limit) + " meets difficulty " +
                  std::to_string(difficulty) + " for block " + std::to_string(index));
}

void mine_into(Block& b, unsigned difficulty) {
  auto [nonce, hash] = mine_block(b.index, b.timestamp, b.data, b.previous_hash, difficulty);
  b.nonce = nonce;
  b.current_hash = std::move(hash);
}

}  // namespace lcaas
