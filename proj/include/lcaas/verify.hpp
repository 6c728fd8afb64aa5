#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "lcaas/chain.hpp"

namespace lcaas {

enum class FailureReason {
  hash_mismatch,
  difficulty_unmet,
  link_broken,
  aggr_mismatch,
  genesis_malformed,
  super_payload_mismatch,
};

std::string_view to_string(FailureReason reason) noexcept;

struct VerificationFailure {
  std::uint64_t block_index = 0;
  Level level = Level::lower;
  FailureReason reason = FailureReason::hash_mismatch;

  friend bool operator==(const VerificationFailure&, const VerificationFailure&) = default;
};

struct VerificationReport {
  bool valid = true;
  /// Blocks whose current_hash was recomputed.
  std::uint64_t checked_blocks = 0;
  std::uint64_t hash_computations = 0;
  std::vector<VerificationFailure> failures;
};

/// Mined kinds: hash recomputation plus difficulty. Genesis kinds: the
/// structural AGB/RGB rules that can be checked without neighbours.
bool verify_block(const Block& b, unsigned difficulty);

/// Checks every lower-level block in index order, then every seal, then every
/// superblock. Failure attribution follows that order.
VerificationReport verify_full(const Superblockchain& sbc, unsigned difficulty);

/// Superblock links, superblock hashes and embedded terminal-block hashes.
/// Cost depends only on the number of superblocks.
VerificationReport verify_upper(const Superblockchain& sbc, unsigned difficulty);

struct TbReport {
  bool found = false;
  bool hash_valid = false;
  bool aggr_valid = false;
  std::optional<std::uint64_t> superblock_index;
};

/// Checks a client-held terminal block against committed superblocks and the
/// stored chain it seals. Throws Error(not_terminal).
TbReport verify_tb(const Superblockchain& sbc, const Block& tb, unsigned difficulty);

}  // namespace lcaas
