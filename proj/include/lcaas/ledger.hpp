#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "lcaas/blob_store.hpp"
#include "lcaas/chain.hpp"
#include "lcaas/config.hpp"
#include "lcaas/search.hpp"
#include "lcaas/verify.hpp"

namespace lcaas {

/// Append-only sink for one namespace's ledger file.
class RecordWriter {
 public:
  virtual ~RecordWriter() = default;
  /// Appends and flushes `bytes`. On failure the file is left as it was and
  /// Error(io_error) is thrown.
  virtual void append(std::string_view bytes) = 0;
};

std::unique_ptr<RecordWriter> open_file_writer(const std::filesystem::path& path);

using WriterFactory = std::function<std::unique_ptr<RecordWriter>(const std::filesystem::path&)>;

struct LedgerOptions {
  /// Never write: no directory lock, no tail repair, no pending promotion.
  bool read_only = false;
  /// Serve even if load-time verification fails.
  bool forensic = false;
  /// Drop an unterminated final line instead of failing.
  bool recover_tail = true;
  WriterFactory writer_factory;  // defaults to open_file_writer
};

struct NamespaceLoad {
  VerificationReport report;
  std::size_t records = 0;
  std::optional<std::size_t> dropped_tail_line;  // 1-based line number
  bool closure_completed = false;  // an interrupted closure was finished at load
};

struct LoadReport {
  bool valid = true;
  std::map<std::string, NamespaceLoad> namespaces;
};

struct NamespaceStats {
  std::size_t data_blocks = 0;
  std::size_t sealed_cbs = 0;
  std::size_t superblocks = 0;
  std::size_t open_cb_size = 0;
};

/// The on-disk ledger directory and the in-memory state of all its
/// namespaces. Writers to one namespace are serialized; readers share a lock
/// that is only held exclusively while a committed transition is installed.
class Ledger {
 public:
  /// Loads every <namespace>.ledger.jsonl under cfg.ledger_dir and verifies it.
  /// Throws Error(corrupt_record), Error(invalid_ledger), Error(locked) or
  /// Error(io_error).
  static std::unique_ptr<Ledger> open(LedgerConfig cfg, Clock clock, LedgerOptions opts = {});

  ~Ledger();
  Ledger(const Ledger&) = delete;
  Ledger& operator=(const Ledger&) = delete;

  IngestReceipt ingest(std::string_view ns, const HexDigest& digest,
                       std::optional<LogMeta> meta = std::nullopt);
  /// Seals, promotes and reopens the open chain. Returns the new superblock,
  /// or nullopt when the open chain has no data blocks.
  std::optional<Block> flush(std::string_view ns);

  /// Throws Error(store_raw_disabled) when raw storage is off.
  HexDigest store_raw(std::string_view content);

  DigestMatches find_by_digest(std::string_view ns, const HexDigest& digest) const;
  std::vector<SearchHit> search(std::string_view ns, const SearchQuery& q) const;
  TbReport verify_tb(std::string_view ns, const Block& tb) const;
  VerificationReport verify(std::string_view ns) const;
  NamespaceStats stats(std::string_view ns) const;
  std::vector<std::string> namespaces() const;

  /// Runs `fn(const Superblockchain&)` against a committed snapshot.
  template <class Fn>
  auto read(std::string_view ns, Fn&& fn) const;

  const LedgerConfig& config() const noexcept { return cfg_; }
  const LoadReport& load_report() const noexcept { return load_report_; }
  const BlobStore& blobs() const noexcept { return blobs_; }

 private:
  struct Namespace {
    mutable std::shared_mutex state_mu;
    std::mutex writer_mu;
    Superblockchain sbc;
    DigestIndex index;
    std::unique_ptr<RecordWriter> writer;
  };

  Ledger(LedgerConfig cfg, Clock clock, LedgerOptions opts);

  void load();
  Namespace* find(std::string_view ns) const;
  Namespace& find_or_create(std::string_view ns);
  void commit(Namespace& n, Transition t);
  RecordWriter& writer_for(Namespace& n);

  LedgerConfig cfg_;
  Clock clock_;
  LedgerOptions opts_;
  BlobStore blobs_;
  LoadReport load_report_;
  int lock_fd_ = -1;

  mutable std::mutex map_mu_;
  std::map<std::string, std::unique_ptr<Namespace>, std::less<>> namespaces_;
};

template <class Fn>
auto Ledger::read(std::string_view ns, Fn&& fn) const {
  if (Namespace* n = find(ns)) {
    std::shared_lock lock(n->state_mu);
    return fn(static_cast<const Superblockchain&>(n->sbc));
  }
  Superblockchain empty;
  empty.name_space = std::string(ns);
  return fn(static_cast<const Superblockchain&>(empty));
}

/// Name of the manifest that pins difficulty for a ledger directory.
inline constexpr const char* kManifestFile = "lcaas.json";

}  // namespace lcaas
