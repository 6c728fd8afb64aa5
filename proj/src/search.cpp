#include "lcaas/search.hpp"

#include "lcaas/error.hpp"

namespace lcaas {

namespace {

bool matches(const Block& b, const SearchQuery& q) {
  if (q.block_index) return b.index == *q.block_index;
  if (q.block_time) return q.block_time->intersects(b.timestamp, b.timestamp);
  const auto& meta = b.data_payload().meta;
  if (!meta) return false;
  auto interval = meta->record_interval();
  return interval && q.record_time->intersects(interval->first, interval->second);
}

// False when the terminal block's ranges rule out every block in the chain.
bool may_contain(const Block& tb, const SearchQuery& q) {
  if (!std::holds_alternative<TerminalPayload>(tb.data)) return true;
  const TerminalPayload& p = tb.terminal_payload();
  if (q.block_index) return p.block_index_from <= *q.block_index && *q.block_index <= p.block_index_to;
  if (q.block_time) return q.block_time->intersects(p.timestamp_from, p.timestamp_to);
  return true;  // terminal ranges describe block time, not record time
}

}  // namespace

void SearchQuery::validate() const {
  const int set = int(block_index.has_value()) + int(block_time.has_value()) + int(record_time.has_value());
  if (set != 1) {
    throw Error(ErrorCode::invalid_argument,
                "exactly one of block_index, block_time, record_time must be given");
  }
  for (const auto* i : {&block_time, &record_time}) {
    if (*i && (*i)->from > (*i)->to) throw Error(ErrorCode::invalid_argument, "interval from exceeds to");
  }
}

std::vector<SearchHit> search(const Superblockchain& sbc, const SearchQuery& q) {
  q.validate();
  std::vector<SearchHit> hits;
  auto scan = [&](const CircledBlockchain& cb, std::uint64_t ordinal) {
    for (const Block& b : cb.blocks) {
      if (std::holds_alternative<DataPayload>(b.data) && matches(b, q)) {
        hits.push_back({b, cb.terminal, ordinal});
      }
    }
  };
  for (std::size_t k = 0; k < sbc.chains.size(); ++k) {
    const CircledBlockchain& cb = sbc.chains[k];
    if (cb.terminal && !may_contain(*cb.terminal, q)) continue;
    scan(cb, k);
  }
  if (sbc.open_cb) scan(*sbc.open_cb, sbc.chains.size());
  return hits;
}

void DigestIndex::add(const Block& data_block, std::uint64_t cb_ordinal) {
  if (!std::holds_alternative<DataPayload>(data_block.data)) return;
  entries_[data_block.data_payload().digest].push_back({data_block.index, cb_ordinal});
}

void DigestIndex::add_transition_blocks(const Superblockchain& before, const Transition& t) {
  if (t.data_block) add(*t.data_block, before.chains.size());
}

void DigestIndex::rebuild(const Superblockchain& sbc) {
  entries_.clear();
  for (std::size_t k = 0; k < sbc.chains.size(); ++k) {
    for (const Block& b : sbc.chains[k].blocks) add(b, k);
  }
  if (sbc.open_cb) {
    for (const Block& b : sbc.open_cb->blocks) add(b, sbc.chains.size());
  }
}

DigestMatches DigestIndex::find(const HexDigest& digest, const Superblockchain& sbc) const {
  DigestMatches m;
  auto it = entries_.find(digest);
  if (it == entries_.end()) return m;
  for (const Entry& e : it->second) {
    m.locations.push_back({e.block_index, e.cb_ordinal, e.cb_ordinal < sbc.chains.size()});
  }
  m.count = m.locations.size();
  return m;
}

}  // namespace lcaas
