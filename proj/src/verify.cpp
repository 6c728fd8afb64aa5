#include "lcaas/verify.hpp"

#include <algorithm>

#include "lcaas/error.hpp"
#include "lcaas/hash.hpp"

namespace lcaas {

namespace {

class Verifier {
 public:
  explicit Verifier(unsigned difficulty) : difficulty_(difficulty) {}

  void fail(const Block& b, Level level, FailureReason reason) {
    VerificationFailure f{b.index, level, reason};
    if (std::find(report_.failures.begin(), report_.failures.end(), f) == report_.failures.end()) {
      report_.failures.push_back(f);
    }
  }

  // Recomputes the hash of a mined block and checks difficulty and kind.
  void check_mined(const Block& b, Level level, BlockKind expected) {
    ++report_.checked_blocks;
    if (b.kind != expected || !kind_matches_payload(b)) {
      fail(b, level, FailureReason::hash_mismatch);
      return;
    }
    if (hash_(canonical_encoding(b)) != b.current_hash) fail(b, level, FailureReason::hash_mismatch);
    if (!meets_difficulty(b.current_hash, difficulty_)) fail(b, level, FailureReason::difficulty_unmet);
  }

  void check_link(const Block& b, Level level, const HexDigest& prev_hash, std::uint64_t expected_index) {
    if (b.previous_hash != prev_hash || b.index != expected_index) {
      fail(b, level, FailureReason::link_broken);
    }
  }

  void check_lower(const Superblockchain& sbc) {
    std::uint64_t expected_index = 0;
    const std::size_t total = sbc.chains.size() + (sbc.open_cb ? 1 : 0);
    for (std::size_t k = 0; k < total; ++k) {
      const CircledBlockchain& cb = k < sbc.chains.size() ? sbc.chains[k] : *sbc.open_cb;
      check_genesis(sbc, k, cb, expected_index);

      HexDigest prev = cb.genesis.current_hash;
      expected_index = cb.genesis.index + 1;
      for (const Block& b : cb.blocks) {
        check_mined(b, Level::lower, BlockKind::data);
        check_link(b, Level::lower, prev, expected_index);
        prev = b.current_hash;
        expected_index = b.index + 1;
      }
      if (cb.terminal) {
        check_mined(*cb.terminal, Level::lower, BlockKind::terminal);
        check_link(*cb.terminal, Level::lower, prev, expected_index);
        expected_index = cb.terminal->index + 1;
      }
    }
  }

  void check_seals(const Superblockchain& sbc) {
    for (const CircledBlockchain& cb : sbc.chains) {
      const Block& tb = *cb.terminal;
      if (cb.blocks.empty() || !std::holds_alternative<TerminalPayload>(tb.data)) {
        fail(tb, Level::lower, FailureReason::aggr_mismatch);
        continue;
      }
      std::string joined = cb.genesis.current_hash.str();
      std::int64_t ts_lo = cb.blocks.front().timestamp;
      std::int64_t ts_hi = ts_lo;
      for (const Block& b : cb.blocks) {
        joined += b.current_hash.str();
        ts_lo = std::min(ts_lo, b.timestamp);
        ts_hi = std::max(ts_hi, b.timestamp);
      }
      const TerminalPayload& p = tb.terminal_payload();
      const bool ranges_ok = p.timestamp_from == ts_lo && p.timestamp_to == ts_hi &&
                             p.block_index_from == cb.blocks.front().index &&
                             p.block_index_to == cb.blocks.back().index;
      if (hash_(joined) != p.aggr_hash || !ranges_ok) fail(tb, Level::lower, FailureReason::aggr_mismatch);
    }
  }

  void check_superblocks(const Superblockchain& sbc, bool recompute_embedded) {
    HexDigest prev = HexDigest::zero();
    for (std::size_t i = 0; i < sbc.superblocks.size(); ++i) {
      const Block& sb = sbc.superblocks[i];
      check_mined(sb, Level::super, BlockKind::super);
      check_link(sb, Level::super, prev, i);
      prev = sb.current_hash;
      if (!std::holds_alternative<SuperPayload>(sb.data)) continue;

      const Block embedded = unembed_terminal(sb.super_payload());
      if (recompute_embedded) {
        ++report_.checked_blocks;
        if (hash_(canonical_encoding(embedded)) != embedded.current_hash ||
            !meets_difficulty(embedded.current_hash, difficulty_)) {
          fail(sb, Level::super, FailureReason::super_payload_mismatch);
        }
      } else if (i >= sbc.chains.size() || embedded != *sbc.chains[i].terminal) {
        fail(sb, Level::super, FailureReason::super_payload_mismatch);
      }
    }
  }

  VerificationReport finish() {
    report_.hash_computations = hash_.count();
    report_.valid = report_.failures.empty();
    return std::move(report_);
  }

 private:
  void check_genesis(const Superblockchain& sbc, std::size_t k, const CircledBlockchain& cb,
                     std::uint64_t expected_index) {
    const Block& g = cb.genesis;
    bool ok = kind_matches_payload(g) && g.nonce == 0 && g.index == expected_index &&
              g.previous_hash == g.current_hash;
    if (k == 0) {
      ok = ok && g.kind == BlockKind::absolute_genesis && g.current_hash.is_zero();
      // The AGB is created by the ingest that commits the first data block.
      if (!cb.blocks.empty()) ok = ok && g.timestamp == cb.blocks.front().timestamp;
    } else {
      const CircledBlockchain& prev_cb = sbc.chains[k - 1];
      ok = ok && g.kind == BlockKind::relative_genesis && prev_cb.terminal &&
           g.current_hash == prev_cb.terminal->current_hash;
      // An RGB is created together with the superblock that precedes it.
      if (k - 1 < sbc.superblocks.size()) ok = ok && g.timestamp == sbc.superblocks[k - 1].timestamp;
    }
    if (!ok) fail(g, Level::lower, FailureReason::genesis_malformed);
  }

  unsigned difficulty_;
  HashCounter hash_;
  VerificationReport report_;
};

}  // namespace

std::string_view to_string(FailureReason reason) noexcept {
  switch (reason) {
    case FailureReason::hash_mismatch: return "hash_mismatch";
    case FailureReason::difficulty_unmet: return "difficulty_unmet";
    case FailureReason::link_broken: return "link_broken";
    case FailureReason::aggr_mismatch: return "aggr_mismatch";
    case FailureReason::genesis_malformed: return "genesis_malformed";
    case FailureReason::super_payload_mismatch: return "super_payload_mismatch";
  }
  return "unknown";
}

bool verify_block(const Block& b, unsigned difficulty) {
  if (!kind_matches_payload(b)) return false;
  switch (b.kind) {
    case BlockKind::absolute_genesis:
      return b.nonce == 0 && b.index == 0 && b.previous_hash.is_zero() && b.current_hash.is_zero();
    case BlockKind::relative_genesis:
      return b.nonce == 0 && b.previous_hash == b.current_hash;
    default:
      return compute_hash(canonical_encoding(b)) == b.current_hash &&
             meets_difficulty(b.current_hash, difficulty);
  }
}

VerificationReport verify_full(const Superblockchain& sbc, unsigned difficulty) {
  Verifier v(difficulty);
  v.check_lower(sbc);
  v.check_seals(sbc);
  v.check_superblocks(sbc, /*recompute_embedded=*/false);
  return v.finish();
}

VerificationReport verify_upper(const Superblockchain& sbc, unsigned difficulty) {
  Verifier v(difficulty);
  v.check_superblocks(sbc, /*recompute_embedded=*/true);
  return v.finish();
}

TbReport verify_tb(const Superblockchain& sbc, const Block& tb, unsigned difficulty) {
  if (tb.kind != BlockKind::terminal || !kind_matches_payload(tb)) {
    throw Error(ErrorCode::not_terminal, "verify_tb expects a terminal block");
  }
  TbReport r;
  r.hash_valid = compute_hash(canonical_encoding(tb)) == tb.current_hash &&
                 meets_difficulty(tb.current_hash, difficulty);

  for (std::size_t i = 0; i < sbc.superblocks.size(); ++i) {
    const Block& sb = sbc.superblocks[i];
    if (std::holds_alternative<SuperPayload>(sb.data) && sb.super_payload().current_hash == tb.current_hash) {
      r.found = true;
      r.superblock_index = sb.index;
      if (i < sbc.chains.size()) {
        // Rehash the stored blocks so a field edit that kept the old
        // current_hash is still caught.
        const CircledBlockchain& cb = sbc.chains[i];
        bool blocks_intact = !cb.blocks.empty();
        std::string joined = cb.genesis.current_hash.str();
        for (const Block& b : cb.blocks) {
          blocks_intact = blocks_intact && compute_hash(canonical_encoding(b)) == b.current_hash;
          joined += b.current_hash.str();
        }
        r.aggr_valid = blocks_intact && compute_hash(joined) == tb.terminal_payload().aggr_hash;
      }
      break;
    }
  }
  return r;
}

}  // namespace lcaas
