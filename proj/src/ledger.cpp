#include "lcaas/ledger.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lcaas/error.hpp"
#include "lcaas/mining.hpp"
#include "lcaas/record.hpp"

namespace lcaas {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kLedgerSuffix = ".ledger.jsonl";

std::string errno_text() { return std::strerror(errno); }

class FileRecordWriter final : public RecordWriter {
 public:
  explicit FileRecordWriter(const fs::path& path) : path_(path) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::io_error, "cannot open " + path.string() + ": " + errno_text());
  }
  ~FileRecordWriter() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void append(std::string_view bytes) override {
    const off_t start = ::lseek(fd_, 0, SEEK_END);
    if (start < 0) throw Error(ErrorCode::io_error, "cannot seek " + path_.string() + ": " + errno_text());
    std::size_t done = 0;
    while (done < bytes.size()) {
      ssize_t n = ::write(fd_, bytes.data() + done, bytes.size() - done);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) rollback(start, "write");
      done += static_cast<std::size_t>(n);
    }
    if (::fdatasync(fd_) != 0) rollback(start, "sync");
  }

 private:
  [[noreturn]] void rollback(off_t start, const char* what) {
    const std::string reason = errno_text();
    if (::ftruncate(fd_, start) != 0) {
      // Leaves a partial tail; the next load drops it.
    }
    throw Error(ErrorCode::io_error, std::string("cannot ") + what + " " + path_.string() + ": " + reason);
  }

  fs::path path_;
  int fd_ = -1;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

[[noreturn]] void corrupt(const fs::path& file, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::corrupt_record, file.filename().string() + ":" + std::to_string(line) + ": " + what);
}

// Rebuilds in-memory chain structure from records in commit order.
void apply_record(Superblockchain& sbc, LedgerRecord r, const fs::path& file, std::size_t line) {
  Block& b = r.block;
  switch (b.kind) {
    case BlockKind::absolute_genesis:
      if (sbc.open_cb || !sbc.chains.empty() || !sbc.superblocks.empty()) {
        corrupt(file, line, "absolute genesis block after the start of the ledger");
      }
      sbc.open_cb = open_chain(std::move(b));
      return;
    case BlockKind::relative_genesis:
      if (sbc.open_cb || sbc.superblocks.empty() || sbc.pending_promotion()) {
        corrupt(file, line, "relative genesis block without a preceding superblock");
      }
      sbc.open_cb = open_chain(std::move(b));
      return;
    case BlockKind::data:
      if (!sbc.open_cb) corrupt(file, line, "data block outside an open circled blockchain");
      sbc.open_cb->blocks.push_back(std::move(b));
      return;
    case BlockKind::terminal:
      if (!sbc.open_cb) corrupt(file, line, "terminal block outside an open circled blockchain");
      sbc.open_cb->terminal = std::move(b);
      sbc.chains.push_back(std::move(*sbc.open_cb));
      sbc.open_cb.reset();
      return;
    case BlockKind::super:
      if (!sbc.pending_promotion()) corrupt(file, line, "superblock without a sealed circled blockchain");
      sbc.superblocks.push_back(std::move(b));
      return;
  }
}

struct LoadedFile {
  Superblockchain sbc;
  std::size_t records = 0;
  std::optional<std::size_t> dropped_tail_line;
  std::size_t valid_bytes = 0;
};

LoadedFile load_file(const fs::path& path, const std::string& ns, bool recover_tail) {
  const std::string bytes = read_file(path);
  LoadedFile out;
  out.sbc.name_space = ns;

  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::size_t last_start = 0;
  while (pos < bytes.size()) {
    ++line_no;
    const std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string::npos) {
      // Unterminated final line: an append that never completed.
      if (!recover_tail) corrupt(path, line_no, "truncated final record");
      out.dropped_tail_line = line_no;
      break;
    }
    std::string_view line(bytes.data() + pos, nl - pos);
    LedgerRecord r;
    try {
      r = parse_line(line);
    } catch (const Error& e) {
      corrupt(path, line_no, e.what());
    }
    if (r.name_space != ns) corrupt(path, line_no, "record belongs to namespace " + r.name_space);
    apply_record(out.sbc, std::move(r), path, line_no);
    ++out.records;
    last_start = pos;
    pos = nl + 1;
  }
  out.valid_bytes = pos;

  // The AGB is only ever written together with the first data block, so an
  // AGB alone at the end is the remains of an incomplete append.
  const auto& open = out.sbc.open_cb;
  if (open && open->genesis.kind == BlockKind::absolute_genesis && open->blocks.empty()) {
    if (!recover_tail) corrupt(path, out.records, "absolute genesis block without data");
    out.sbc.open_cb.reset();
    --out.records;
    out.dropped_tail_line = out.records + 1;
    out.valid_bytes = last_start;
  }
  return out;
}

std::string summarize(const LoadReport& report) {
  std::string s = "ledger failed verification:";
  int shown = 0;
  for (const auto& [ns, load] : report.namespaces) {
    for (const auto& f : load.report.failures) {
      if (shown++ == 5) return s + " ...";
      s += " [" + ns + " block " + std::to_string(f.block_index) + " (" + std::string(to_string(f.level)) +
           "): " + std::string(to_string(f.reason)) + "]";
    }
  }
  return s;
}

}  // namespace

std::unique_ptr<RecordWriter> open_file_writer(const fs::path& path) {
  return std::make_unique<FileRecordWriter>(path);
}

Ledger::Ledger(LedgerConfig cfg, Clock clock, LedgerOptions opts)
    : cfg_(std::move(cfg)),
      clock_(std::move(clock)),
      opts_(std::move(opts)),
      blobs_(cfg_.ledger_dir / "blobs", cfg_.store_raw) {
  if (!opts_.writer_factory) opts_.writer_factory = open_file_writer;
}

Ledger::~Ledger() {
  if (lock_fd_ >= 0) ::close(lock_fd_);
}

std::unique_ptr<Ledger> Ledger::open(LedgerConfig cfg, Clock clock, LedgerOptions opts) {
  cfg.validate();
  std::unique_ptr<Ledger> ledger(new Ledger(std::move(cfg), std::move(clock), std::move(opts)));
  ledger->load();
  return ledger;
}

void Ledger::load() {
  const fs::path& dir = cfg_.ledger_dir;
  std::error_code ec;
  if (opts_.read_only) {
    if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::io_error, "no ledger directory at " + dir.string());
  } else {
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::io_error, "cannot create " + dir.string() + ": " + ec.message());
    lock_fd_ = ::open((dir / ".lock").c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (lock_fd_ < 0) throw Error(ErrorCode::io_error, "cannot open lock file: " + errno_text());
    if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
      throw Error(ErrorCode::locked, "ledger directory " + dir.string() + " is in use by another writer");
    }
  }

  // Difficulty is fixed when the directory is created.
  const fs::path manifest = dir / kManifestFile;
  if (fs::exists(manifest, ec)) {
    json m = json::parse(read_file(manifest), nullptr, false);
    if (m.is_discarded() || !m.contains("difficulty") || !m["difficulty"].is_number_unsigned() ||
        m["difficulty"].get<unsigned>() > kMaxDifficulty) {
      throw Error(ErrorCode::corrupt_record, "malformed " + manifest.string());
    }
    cfg_.difficulty = m["difficulty"].get<unsigned>();
  } else if (!opts_.read_only) {
    std::ofstream out(manifest, std::ios::trunc);
    out << json{{"difficulty", cfg_.difficulty}}.dump() << '\n';
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + manifest.string());
  }

  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_regular_file() || name.size() <= kLedgerSuffix.size() ||
        !name.ends_with(kLedgerSuffix)) {
      continue;
    }
    const std::string ns = name.substr(0, name.size() - kLedgerSuffix.size());
    if (!is_valid_namespace(ns)) throw Error(ErrorCode::corrupt_record, "bad ledger file name " + name);

    LoadedFile loaded = load_file(entry.path(), ns, opts_.recover_tail);
    if (loaded.dropped_tail_line && !opts_.read_only) {
      fs::resize_file(entry.path(), loaded.valid_bytes, ec);
      if (ec) throw Error(ErrorCode::io_error, "cannot drop truncated tail: " + ec.message());
    }

    NamespaceLoad nl;
    nl.records = loaded.records;
    nl.dropped_tail_line = loaded.dropped_tail_line;
    nl.report = verify_full(loaded.sbc, cfg_.difficulty);
    load_report_.valid = load_report_.valid && nl.report.valid;

    auto n = std::make_unique<Namespace>();
    n->sbc = std::move(loaded.sbc);
    n->index.rebuild(n->sbc);
    load_report_.namespaces.emplace(ns, std::move(nl));
    namespaces_.emplace(ns, std::move(n));
  }

  if (!load_report_.valid && !opts_.forensic) {
    throw Error(ErrorCode::invalid_ledger, summarize(load_report_));
  }

  // A crash inside a closure leaves either a sealed but unpromoted chain or a
  // full chain that was never sealed; finish the closure now.
  if (!opts_.read_only && load_report_.valid) {
    for (auto& [ns, n] : namespaces_) {
      if (n->sbc.pending_promotion()) {
        commit(*n, plan_complete_promotion(n->sbc, cfg_, clock_()));
        load_report_.namespaces[ns].closure_completed = true;
      }
      if (n->sbc.open_cb && n->sbc.open_cb->blocks.size() >= cfg_.max_blocks_per_cb) {
        commit(*n, std::move(*plan_flush(n->sbc, cfg_, clock_())));
        load_report_.namespaces[ns].closure_completed = true;
      }
    }
  }
}

Ledger::Namespace* Ledger::find(std::string_view ns) const {
  std::lock_guard lock(map_mu_);
  auto it = namespaces_.find(ns);
  return it == namespaces_.end() ? nullptr : it->second.get();
}

Ledger::Namespace& Ledger::find_or_create(std::string_view ns) {
  if (!is_valid_namespace(ns)) {
    throw Error(ErrorCode::invalid_argument, "invalid namespace \"" + std::string(ns) + "\"");
  }
  std::lock_guard lock(map_mu_);
  auto it = namespaces_.find(ns);
  if (it == namespaces_.end()) {
    auto n = std::make_unique<Namespace>();
    n->sbc.name_space = std::string(ns);
    it = namespaces_.emplace(std::string(ns), std::move(n)).first;
  }
  return *it->second;
}

RecordWriter& Ledger::writer_for(Namespace& n) {
  if (!n.writer) n.writer = opts_.writer_factory(cfg_.ledger_dir / ledger_file_name(n.sbc.name_space));
  return *n.writer;
}

void Ledger::commit(Namespace& n, Transition t) {
  std::string lines;
  for (const auto& [level, block] : t.records) lines += to_line({n.sbc.name_space, level, block});
  writer_for(n).append(lines);

  std::unique_lock lock(n.state_mu);
  n.index.add_transition_blocks(n.sbc, t);
  apply_transition(n.sbc, std::move(t));
}

IngestReceipt Ledger::ingest(std::string_view ns, const HexDigest& digest, std::optional<LogMeta> meta) {
  if (opts_.read_only) throw Error(ErrorCode::invalid_argument, "ledger is open read-only");
  Namespace& n = find_or_create(ns);
  std::lock_guard writer(n.writer_mu);
  Transition t = plan_ingest(n.sbc, digest, std::move(meta), cfg_, clock_());
  const IngestReceipt receipt{t.data_block->index, t.data_block->timestamp};
  commit(n, std::move(t));
  return receipt;
}

std::optional<Block> Ledger::flush(std::string_view ns) {
  if (opts_.read_only) throw Error(ErrorCode::invalid_argument, "ledger is open read-only");
  if (!is_valid_namespace(ns)) {
    throw Error(ErrorCode::invalid_argument, "invalid namespace \"" + std::string(ns) + "\"");
  }
  Namespace* n = find(ns);
  if (!n) return std::nullopt;
  std::lock_guard writer(n->writer_mu);
  auto t = plan_flush(n->sbc, cfg_, clock_());
  if (!t) return std::nullopt;
  Block sb = *t->superblock;
  commit(*n, std::move(*t));
  return sb;
}

HexDigest Ledger::store_raw(std::string_view content) { return blobs_.store(content); }

DigestMatches Ledger::find_by_digest(std::string_view ns, const HexDigest& digest) const {
  Namespace* n = find(ns);
  if (!n) return {};
  std::shared_lock lock(n->state_mu);
  return n->index.find(digest, n->sbc);
}

std::vector<SearchHit> Ledger::search(std::string_view ns, const SearchQuery& q) const {
  return read(ns, [&](const Superblockchain& sbc) { return lcaas::search(sbc, q); });
}

TbReport Ledger::verify_tb(std::string_view ns, const Block& tb) const {
  return read(ns, [&](const Superblockchain& sbc) { return lcaas::verify_tb(sbc, tb, cfg_.difficulty); });
}

VerificationReport Ledger::verify(std::string_view ns) const {
  return read(ns, [&](const Superblockchain& sbc) { return verify_full(sbc, cfg_.difficulty); });
}

NamespaceStats Ledger::stats(std::string_view ns) const {
  return read(ns, [](const Superblockchain& sbc) {
    return NamespaceStats{sbc.data_block_count(), sbc.chains.size(), sbc.superblocks.size(),
                          sbc.open_cb ? sbc.open_cb->blocks.size() : 0};
  });
}

std::vector<std::string> Ledger::namespaces() const {
  std::lock_guard lock(map_mu_);
  std::vector<std::string> out;
  for (const auto& [name, _] : namespaces_) out.push_back(name);
  return out;
}

}  // namespace lcaas
