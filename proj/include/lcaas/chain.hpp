#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lcaas/block.hpp"
#include "lcaas/config.hpp"

namespace lcaas {

enum class Level { lower, super };

std::string_view to_string(Level level) noexcept;

/// A genesis block, its data blocks and, once sealed, a terminal block.
struct CircledBlockchain {
  Block genesis;
  std::vector<Block> blocks;
  std::optional<Block> terminal;
  std::int64_t opened_at = 0;

  bool sealed() const noexcept { return terminal.has_value(); }
  /// Last block of the chain, including the terminal block once sealed.
  const Block& tail() const noexcept;
  std::uint64_t next_index() const noexcept { return tail().index + 1; }

  friend bool operator==(const CircledBlockchain&, const CircledBlockchain&) = default;
};

/// One namespace's ledger: the superblock chain, the sealed circled
/// blockchains it notarizes (chains[i] is embedded in superblocks[i]), and the
/// currently open circled blockchain.
struct Superblockchain {
  std::string name_space = "default";
  std::vector<Block> superblocks;
  std::vector<CircledBlockchain> chains;
  std::optional<CircledBlockchain> open_cb;

  /// A sealed chain whose superblock has not been committed yet.
  bool pending_promotion() const noexcept { return chains.size() > superblocks.size(); }
  std::size_t data_block_count() const noexcept;

  friend bool operator==(const Superblockchain&, const Superblockchain&) = default;
};

Block new_absolute_genesis(std::int64_t now);
/// Throws Error(not_superblock) if prev_super is not a superblock.
Block new_relative_genesis(const Block& prev_super, std::int64_t now);

CircledBlockchain open_chain(Block genesis);

/// Mines a data block onto `chain`. Throws Error(chain_sealed) or
/// Error(capacity_exceeded).
Block append_data_block(CircledBlockchain& chain, const HexDigest& digest,
                        std::optional<LogMeta> meta, std::int64_t now,
                        const LedgerConfig& cfg);

/// SHA-256 over the concatenated current_hash values of the genesis and data
/// blocks, in index order. Throws Error(empty_chain).
HexDigest compute_aggr_hash(const CircledBlockchain& chain);

/// Builds and mines the terminal block and marks the chain sealed.
Block seal_chain(CircledBlockchain& chain, std::int64_t now, unsigned difficulty);

/// Mines a superblock embedding `tb` and appends it. Throws Error(not_terminal).
Block promote_to_superblock(Superblockchain& sbc, const Block& tb, std::int64_t now,
                            unsigned difficulty);

bool should_close(const CircledBlockchain& chain, const LedgerConfig& cfg, std::int64_t now);

struct LeveledBlock {
  Level level;
  Block block;
};

/// A set of new blocks computed against a Superblockchain but not yet applied.
/// `records` lists them in commit order; apply_transition() installs them.
struct Transition {
  std::vector<LeveledBlock> records;
  std::optional<Block> data_block;
  std::optional<CircledBlockchain> sealed;  // newly sealed chain to archive
  std::optional<Block> superblock;
  std::optional<CircledBlockchain> open;    // the open chain afterwards
};

/// Append one digest, closing and promoting the open chain when should_close
/// holds afterwards. `sbc` must not have a pending promotion.
Transition plan_ingest(const Superblockchain& sbc, const HexDigest& digest,
                       std::optional<LogMeta> meta, const LedgerConfig& cfg, std::int64_t now);

/// Seal, promote and reopen if the open chain holds at least one data block.
/// Returns nullopt when there is nothing to seal.
std::optional<Transition> plan_flush(const Superblockchain& sbc, const LedgerConfig& cfg,
                                     std::int64_t now);

/// Promote a chain that was sealed but whose superblock never got committed.
Transition plan_complete_promotion(const Superblockchain& sbc, const LedgerConfig& cfg,
                                   std::int64_t now);

void apply_transition(Superblockchain& sbc, Transition t);

struct IngestReceipt {
  std::uint64_t block_index = 0;
  std::int64_t timestamp = 0;
};

/// plan_ingest followed by apply_transition.
IngestReceipt ingest(Superblockchain& sbc, const HexDigest& digest, std::optional<LogMeta> meta,
                     const LedgerConfig& cfg, std::int64_t now);

}  // namespace lcaas
