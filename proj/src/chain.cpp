#include "lcaas/chain.hpp"

#include <algorithm>

#include "lcaas/error.hpp"
#include "lcaas/hash.hpp"
#include "lcaas/mining.hpp"

namespace lcaas {

namespace {

Block make_superblock(const Block* last_super, const Block& tb, std::int64_t now,
                      unsigned difficulty) {
  Block sb;
  sb.kind = BlockKind::super;
  sb.index = last_super ? last_super->index + 1 : 0;
  sb.timestamp = now;
  sb.data = embed_terminal(tb);
  sb.previous_hash = last_super ? last_super->current_hash : HexDigest::zero();
  mine_into(sb, difficulty);
  return sb;
}

const Block* last_superblock(const Superblockchain& sbc) {
  return sbc.superblocks.empty() ? nullptr : &sbc.superblocks.back();
}

// Seal `cb`, promote its terminal block and open the next chain.
void close_into(Transition& t, CircledBlockchain cb, const Block* last_super, unsigned difficulty,
                std::int64_t now) {
  Block tb = seal_chain(cb, now, difficulty);
  t.records.push_back({Level::lower, tb});
  Block sb = make_superblock(last_super, tb, now, difficulty);
  t.records.push_back({Level::super, sb});
  Block rgb = new_relative_genesis(sb, now);
  t.records.push_back({Level::lower, rgb});
  t.sealed = std::move(cb);
  t.superblock = std::move(sb);
  t.open = open_chain(std::move(rgb));
}

}  // namespace

std::string_view to_string(Level level) noexcept {
  return level == Level::lower ? "lower" : "super";
}

const Block& CircledBlockchain::tail() const noexcept {
  if (terminal) return *terminal;
  return blocks.empty() ? genesis : blocks.back();
}

std::size_t Superblockchain::data_block_count() const noexcept {
  std::size_t n = open_cb ? open_cb->blocks.size() : 0;
  for (const auto& cb : chains) n += cb.blocks.size();
  return n;
}

Block new_absolute_genesis(std::int64_t now) {
  return Block{0, 0, now, BlockKind::absolute_genesis, GenesisPayload{}, HexDigest::zero(),
               HexDigest::zero()};
}

Block new_relative_genesis(const Block& prev_super, std::int64_t now) {
  if (prev_super.kind != BlockKind::super || !kind_matches_payload(prev_super)) {
    throw Error(ErrorCode::not_superblock,
                "relative genesis requires a superblock, got " + std::string(to_string(prev_super.kind)));
  }
  const SuperPayload& tb = prev_super.super_payload();
  return Block{0, tb.index + 1, now, BlockKind::relative_genesis, GenesisPayload{}, tb.current_hash,
               tb.current_hash};
}

CircledBlockchain open_chain(Block genesis) {
  const std::int64_t opened_at = genesis.timestamp;
  return CircledBlockchain{std::move(genesis), {}, std::nullopt, opened_at};
}

Block append_data_block(CircledBlockchain& chain, const HexDigest& digest,
                        std::optional<LogMeta> meta, std::int64_t now, const LedgerConfig& cfg) {
  if (chain.sealed()) {
    throw Error(ErrorCode::chain_sealed, "circled blockchain is sealed");
  }
  if (chain.blocks.size() >= cfg.max_blocks_per_cb) {
    throw Error(ErrorCode::capacity_exceeded, "circled blockchain is full");
  }
  if (meta && meta->empty()) meta.reset();
  if (meta && !meta->well_formed()) {
    throw Error(ErrorCode::invalid_argument, "ts_from exceeds ts_to");
  }

  Block b;
  b.kind = BlockKind::data;
  b.index = chain.next_index();
  b.timestamp = now;
  b.data = DataPayload{digest, std::move(meta)};
  b.previous_hash = chain.tail().current_hash;
  mine_into(b, cfg.difficulty);
  chain.blocks.push_back(b);
  return b;
}

HexDigest compute_aggr_hash(const CircledBlockchain& chain) {
  if (chain.blocks.empty()) {
    throw Error(ErrorCode::empty_chain, "aggr_hash needs at least one data block");
  }
  std::string joined = chain.genesis.current_hash.str();
  joined.reserve(HexDigest::kLength * (chain.blocks.size() + 1));
  for (const auto& b : chain.blocks) joined += b.current_hash.str();
  return compute_hash(joined);
}

Block seal_chain(CircledBlockchain& chain, std::int64_t now, unsigned difficulty) {
  if (chain.sealed()) {
    throw Error(ErrorCode::chain_sealed, "circled blockchain is already sealed");
  }
  if (chain.blocks.empty()) {
    throw Error(ErrorCode::empty_chain, "cannot seal a circled blockchain without data blocks");
  }
  auto [lo, hi] = std::minmax_element(chain.blocks.begin(), chain.blocks.end(),
                                      [](const Block& a, const Block& b) { return a.timestamp < b.timestamp; });
  TerminalPayload payload{compute_aggr_hash(chain), lo->timestamp, hi->timestamp,
                          chain.blocks.front().index, chain.blocks.back().index};

  Block tb;
  tb.kind = BlockKind::terminal;
  tb.index = chain.next_index();
  tb.timestamp = now;
  tb.data = payload;
  tb.previous_hash = chain.blocks.back().current_hash;
  mine_into(tb, difficulty);
  chain.terminal = tb;
  return tb;
}

Block promote_to_superblock(Superblockchain& sbc, const Block& tb, std::int64_t now,
                            unsigned difficulty) {
  if (tb.kind != BlockKind::terminal) {
    throw Error(ErrorCode::not_terminal, "only terminal blocks can be promoted");
  }
  if (sbc.pending_promotion() && tb != *sbc.chains[sbc.superblocks.size()].terminal) {
    throw Error(ErrorCode::invalid_argument, "terminal block does not seal the pending chain");
  }
  Block sb = make_superblock(last_superblock(sbc), tb, now, difficulty);
  sbc.superblocks.push_back(sb);
  return sb;
}

bool should_close(const CircledBlockchain& chain, const LedgerConfig& cfg, std::int64_t now) {
  const std::size_t n = chain.blocks.size();
  if (n >= cfg.max_blocks_per_cb) return true;
  return n >= 1 && now - chain.opened_at >= cfg.max_open_window_seconds;
}

Transition plan_ingest(const Superblockchain& sbc, const HexDigest& digest,
                       std::optional<LogMeta> meta, const LedgerConfig& cfg, std::int64_t now) {
  if (sbc.pending_promotion()) {
    throw Error(ErrorCode::invalid_argument, "namespace has a sealed chain awaiting promotion");
  }
  Transition t;
  CircledBlockchain cb;
  if (sbc.open_cb) {
    cb = *sbc.open_cb;
  } else {
    // An RGB always carries the timestamp of the superblock it follows.
    Block genesis = sbc.superblocks.empty()
                        ? new_absolute_genesis(now)
                        : new_relative_genesis(sbc.superblocks.back(), sbc.superblocks.back().timestamp);
    t.records.push_back({Level::lower, genesis});
    cb = open_chain(std::move(genesis));
  }

  Block d = append_data_block(cb, digest, std::move(meta), now, cfg);
  t.records.push_back({Level::lower, d});
  t.data_block = std::move(d);

  if (should_close(cb, cfg, now)) {
    close_into(t, std::move(cb), last_superblock(sbc), cfg.difficulty, now);
  } else {
    t.open = std::move(cb);
  }
  return t;
}

std::optional<Transition> plan_flush(const Superblockchain& sbc, const LedgerConfig& cfg,
                                     std::int64_t now) {
  if (sbc.pending_promotion()) {
    throw Error(ErrorCode::invalid_argument, "namespace has a sealed chain awaiting promotion");
  }
  if (!sbc.open_cb || sbc.open_cb->blocks.empty()) return std::nullopt;
  Transition t;
  close_into(t, *sbc.open_cb, last_superblock(sbc), cfg.difficulty, now);
  return t;
}

Transition plan_complete_promotion(const Superblockchain& sbc, const LedgerConfig& cfg,
                                   std::int64_t now) {
  if (!sbc.pending_promotion()) {
    throw Error(ErrorCode::invalid_argument, "no chain awaiting promotion");
  }
  const Block& tb = *sbc.chains[sbc.superblocks.size()].terminal;
  Transition t;
  Block sb = make_superblock(last_superblock(sbc), tb, now, cfg.difficulty);
  t.records.push_back({Level::super, sb});
  Block rgb = new_relative_genesis(sb, now);
  t.records.push_back({Level::lower, rgb});
  t.superblock = std::move(sb);
  t.open = open_chain(std::move(rgb));
  return t;
}

void apply_transition(Superblockchain& sbc, Transition t) {
  if (t.sealed) sbc.chains.push_back(std::move(*t.sealed));
  if (t.superblock) sbc.superblocks.push_back(std::move(*t.superblock));
  sbc.open_cb = std::move(t.open);
}

IngestReceipt ingest(Superblockchain& sbc, const HexDigest& digest, std::optional<LogMeta> meta,
                     const LedgerConfig& cfg, std::int64_t now) {
  Transition t = plan_ingest(sbc, digest, std::move(meta), cfg, now);
  IngestReceipt receipt{t.data_block->index, t.data_block->timestamp};
  apply_transition(sbc, std::move(t));
  return receipt;
}

}  // namespace lcaas
