#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "lcaas/chain.hpp"

namespace lcaas {

/// Closed interval [from, to].
struct Interval {
  std::int64_t from = 0;
  std::int64_t to = 0;

  bool intersects(std::int64_t lo, std::int64_t hi) const noexcept { return lo <= to && from <= hi; }
};

/// Exactly one variant must be set; validate() enforces it.
struct SearchQuery {
  std::optional<std::uint64_t> block_index;
  std::optional<Interval> block_time;
  std::optional<Interval> record_time;

  /// Throws Error(invalid_argument) on zero or multiple variants, or from > to.
  void validate() const;

  static SearchQuery by_index(std::uint64_t index) { return {index, {}, {}}; }
  static SearchQuery by_block_time(Interval i) { return {{}, i, {}}; }
  static SearchQuery by_record_time(Interval i) { return {{}, {}, i}; }
};

struct SearchHit {
  Block block;
  std::optional<Block> terminal;  // absent while the chain is open
  std::uint64_t cb_ordinal = 0;

  bool sealed() const noexcept { return terminal.has_value(); }
};

/// Data blocks matching `q`, in index order. Sealed chains are pruned by
/// their terminal block's index and timestamp ranges before being scanned.
std::vector<SearchHit> search(const Superblockchain& sbc, const SearchQuery& q);

struct DigestLocation {
  std::uint64_t block_index = 0;
  std::uint64_t cb_ordinal = 0;
  bool sealed = false;

  friend bool operator==(const DigestLocation&, const DigestLocation&) = default;
};

struct DigestMatches {
  std::uint64_t count = 0;
  std::vector<DigestLocation> locations;
};

/// digest -> data block locations. Rebuilt at load, extended on commit.
class DigestIndex {
 public:
  void add(const Block& data_block, std::uint64_t cb_ordinal);
  void add_transition_blocks(const Superblockchain& before, const Transition& t);
  void rebuild(const Superblockchain& sbc);

  DigestMatches find(const HexDigest& digest, const Superblockchain& sbc) const;

 private:
  struct Entry {
    std::uint64_t block_index;
    std::uint64_t cb_ordinal;
  };
  std::unordered_map<HexDigest, std::vector<Entry>> entries_;
};

}  // namespace lcaas
