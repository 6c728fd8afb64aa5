#include "cli.hpp"

#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "lcaas/error.hpp"
#include "lcaas/hash.hpp"
#include "lcaas/service.hpp"

namespace lcaas::cli {

using nlohmann::json;

namespace {

std::mutex g_serving_mu;
Service* g_serving = nullptr;
std::atomic<bool> g_stop_requested{false};

// An operational failure carrying a target-side error code.
struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LedgerFlags {
  std::string dir = "ledger";
  unsigned difficulty = 2;
  std::size_t max_blocks = 10;
  std::int64_t window_seconds = 3600;
  bool store_raw = false;
  std::optional<std::int64_t> fixed_epoch;

  LedgerConfig config() const {
    LedgerConfig cfg;
    cfg.ledger_dir = dir;
    cfg.difficulty = difficulty;
    cfg.max_blocks_per_cb = max_blocks;
    cfg.max_open_window_seconds = window_seconds;
    cfg.store_raw = store_raw;
    return cfg;
  }
  Clock clock() const { return fixed_epoch ? fixed_clock(*fixed_epoch) : system_clock(); }
};

void add_ledger_flags(CLI::App* cmd, LedgerFlags& f, bool with_dir) {
  if (with_dir) cmd->add_option("--dir", f.dir, "Ledger directory")->envname("LCAAS_DIR");
  cmd->add_option("--difficulty", f.difficulty, "Leading zero hex digits required per block hash")
      ->envname("LCAAS_DIFFICULTY");
  cmd->add_option("--max-blocks", f.max_blocks, "Data blocks per circled blockchain")
      ->envname("LCAAS_MAX_BLOCKS");
  cmd->add_option("--window-seconds", f.window_seconds, "Maximum time a circled blockchain stays open")
      ->envname("LCAAS_WINDOW_SECONDS");
  cmd->add_flag("--store-raw", f.store_raw, "Keep raw log content in the blob store")->envname("LCAAS_STORE_RAW");
  cmd->add_option("--fixed-clock", f.fixed_epoch, "Use this epoch for every timestamp")
      ->envname("LCAAS_FIXED_CLOCK");
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::io_error, "cannot read " + path);
  return ss.str();
}

// Where submit/verify/flush/inspect send their requests.
class Target {
 public:
  virtual ~Target() = default;
  virtual IngestReceipt submit_raw(const std::string& ns, const std::string& content,
                                   const std::optional<LogMeta>& meta) = 0;
  virtual IngestReceipt submit_digest(const std::string& ns, const HexDigest& digest,
                                      const std::optional<LogMeta>& meta) = 0;
  virtual std::uint64_t count(const std::string& ns, const HexDigest& digest) = 0;
  virtual std::optional<Block> flush(const std::string& ns) = 0;
  virtual std::vector<SearchHit> search(const std::string& ns, const SearchQuery& q) = 0;
};

class LocalTarget final : public Target {
 public:
  explicit LocalTarget(std::unique_ptr<Ledger> ledger) : ledger_(std::move(ledger)) {}

  IngestReceipt submit_raw(const std::string& ns, const std::string& content,
                           const std::optional<LogMeta>& meta) override {
    if (ledger_->blobs().enabled()) ledger_->store_raw(content);
    return ledger_->ingest(ns, compute_hash(content), meta);
  }
  IngestReceipt submit_digest(const std::string& ns, const HexDigest& digest,
                              const std::optional<LogMeta>& meta) override {
    return ledger_->ingest(ns, digest, meta);
  }
  std::uint64_t count(const std::string& ns, const HexDigest& digest) override {
    return ledger_->find_by_digest(ns, digest).count;
  }
  std::optional<Block> flush(const std::string& ns) override { return ledger_->flush(ns); }
  std::vector<SearchHit> search(const std::string& ns, const SearchQuery& q) override {
    return ledger_->search(ns, q);
  }

 private:
  std::unique_ptr<Ledger> ledger_;
};

class RemoteTarget final : public Target {
 public:
  explicit RemoteTarget(const std::string& url) : client_(url) {
    if (!client_.is_valid()) throw CliError("invalid service URL " + url);
    client_.set_connection_timeout(5);
    client_.set_read_timeout(300);
  }

  IngestReceipt submit_raw(const std::string& ns, const std::string& content,
                           const std::optional<LogMeta>& meta) override {
    httplib::Params params{{"namespace", ns}};
    if (meta) {
      if (meta->file_name) params.emplace("file_name", *meta->file_name);
      if (meta->ts_from) params.emplace("ts_from", std::to_string(*meta->ts_from));
      if (meta->ts_to) params.emplace("ts_to", std::to_string(*meta->ts_to));
    }
    const std::string path = httplib::append_query_params("/submit_raw", params);
    return receipt(check(client_.Post(path, content, "application/octet-stream")));
  }

  IngestReceipt submit_digest(const std::string& ns, const HexDigest& digest,
                              const std::optional<LogMeta>& meta) override {
    json body = {{"digest", digest.str()}, {"namespace", ns}};
    if (meta) {
      if (meta->file_name) body["file_name"] = *meta->file_name;
      if (meta->ts_from) body["ts_from"] = *meta->ts_from;
      if (meta->ts_to) body["ts_to"] = *meta->ts_to;
    }
    return receipt(post_json("/submit_digest", body));
  }

  std::uint64_t count(const std::string& ns, const HexDigest& digest) override {
    return post_json("/verify_digest", {{"digest", digest.str()}, {"namespace", ns}})
        .at("count")
        .get<std::uint64_t>();
  }

  std::optional<Block> flush(const std::string& ns) override {
    json r = post_json("/flush", {{"namespace", ns}});
    if (r.at("superblock").is_null()) return std::nullopt;
    return block_from_json(r.at("superblock"));
  }

  std::vector<SearchHit> search(const std::string& ns, const SearchQuery& q) override {
    json body = {{"namespace", ns}};
    if (q.block_index) body["block_index"] = *q.block_index;
    if (q.block_time) body["block_time"] = {{"from", q.block_time->from}, {"to", q.block_time->to}};
    if (q.record_time) body["record_time"] = {{"from", q.record_time->from}, {"to", q.record_time->to}};
    const json response = post_json("/search", body);
    std::vector<SearchHit> hits;
    for (const json& r : response.at("results")) {
      SearchHit h{block_from_json(r.at("block")), std::nullopt, r.at("cb_ordinal").get<std::uint64_t>()};
      if (!r.at("terminal").is_null()) h.terminal = block_from_json(r.at("terminal"));
      hits.push_back(std::move(h));
    }
    return hits;
  }

 private:
  json post_json(const char* path, const json& body) {
    return check(client_.Post(path, body.dump(), "application/json"));
  }

  static json check(const httplib::Result& res) {
    if (!res) throw CliError("request failed: " + httplib::to_string(res.error()));
    json j = json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw CliError("unexpected response (HTTP " + std::to_string(res->status) + ")");
    }
    if (j.value("status", "") != "success") {
      const json& e = j.value("error", json::object());
      throw CliError(e.value("code", "unknown") + ": " + e.value("message", ""));
    }
    return j;
  }

  static IngestReceipt receipt(const json& j) {
    return {j.at("block_index").get<std::uint64_t>(), j.at("timestamp").get<std::int64_t>()};
  }

  httplib::Client client_;
};

struct TargetFlags {
  std::string url;
  LedgerFlags ledger;
  std::string ns = "default";
};

void add_target_flags(CLI::App* cmd, TargetFlags& t) {
  auto* url = cmd->add_option("--url", t.url, "Service base URL, e.g. http://127.0.0.1:8080");
  auto* dir = cmd->add_option("--dir", t.ledger.dir, "Local ledger directory (embedded mode)");
  url->excludes(dir);
  add_ledger_flags(cmd, t.ledger, /*with_dir=*/false);
  cmd->add_option("--namespace", t.ns, "Client namespace")->capture_default_str();
}

std::unique_ptr<Target> make_target(const TargetFlags& t, bool read_only) {
  if (!t.url.empty()) return std::make_unique<RemoteTarget>(t.url);
  LedgerOptions opts;
  opts.read_only = read_only;
  opts.forensic = read_only;
  return std::make_unique<LocalTarget>(Ledger::open(t.ledger.config(), t.ledger.clock(), opts));
}

std::optional<LogMeta> meta_from(const std::optional<std::string>& file_name,
                                 const std::optional<std::int64_t>& ts_from,
                                 const std::optional<std::int64_t>& ts_to) {
  LogMeta m{file_name, ts_from, ts_to};
  if (!m.well_formed()) throw Error(ErrorCode::invalid_argument, "--ts-from exceeds --ts-to");
  if (m.empty()) return std::nullopt;
  return m;
}

void print_block(std::ostream& out, const Block& b, const char* indent = "") {
  out << indent << to_string(b.kind) << " index=" << b.index << " timestamp=" << b.timestamp
      << " nonce=" << b.nonce << " hash=" << b.current_hash.str() << '\n';
  if (const auto* d = std::get_if<DataPayload>(&b.data)) {
    out << indent << "  digest=" << d->digest.str();
    if (d->meta) {
      if (d->meta->file_name) out << " file_name=" << *d->meta->file_name;
      if (d->meta->ts_from) out << " ts_from=" << *d->meta->ts_from;
      if (d->meta->ts_to) out << " ts_to=" << *d->meta->ts_to;
    }
    out << '\n';
  } else if (const auto* t = std::get_if<TerminalPayload>(&b.data)) {
    out << indent << "  aggr_hash=" << t->aggr_hash.str() << " blocks=" << t->block_index_from << ".."
        << t->block_index_to << " time=" << t->timestamp_from << ".." << t->timestamp_to << '\n';
  }
}

json report_json(const VerificationReport& r) {
  json failures = json::array();
  for (const auto& f : r.failures) {
    failures.push_back({{"block_index", f.block_index}, {"level", to_string(f.level)}, {"reason", to_string(f.reason)}});
  }
  return {{"valid", r.valid},
          {"checked_blocks", r.checked_blocks},
          {"hash_computations", r.hash_computations},
          {"failures", std::move(failures)}};
}

std::pair<std::string, int> split_addr(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::invalid_argument, "address must be host:port");
  int port = 0;
  try {
    port = std::stoi(addr.substr(colon + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_argument, "address must be host:port");
  }
  return {addr.substr(0, colon), port};
}

int exit_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::invalid_ledger:
    case ErrorCode::corrupt_record: return kNegative;
    default: return kOperational;
  }
}

}  // namespace

std::vector<std::string> split_chunks(const std::string& content, std::size_t lines_per_chunk) {
  if (lines_per_chunk == 0) return {content};
  std::vector<std::string> chunks;
  std::size_t start = 0;
  std::size_t pos = 0;
  std::size_t lines = 0;
  while (pos < content.size()) {
    std::size_t nl = content.find('\n', pos);
    pos = nl == std::string::npos ? content.size() : nl + 1;
    if (++lines == lines_per_chunk) {
      chunks.push_back(content.substr(start, pos - start));
      start = pos;
      lines = 0;
    }
  }
  if (start < content.size()) chunks.push_back(content.substr(start));
  return chunks;
}

void stop_serving() {
  g_stop_requested = true;
  std::lock_guard lock(g_serving_mu);
  if (g_serving) g_serving->stop();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Hooks& hooks) {
  CLI::App app{"Hierarchical proof-of-work ledger for log notarization", "lcaas"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "Machine-readable output");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  LedgerFlags serve_flags;
  std::string addr = "127.0.0.1:8080";
  bool forensic = false;
  serve->add_option("--addr", addr, "host:port to listen on")->envname("LCAAS_ADDR")->capture_default_str();
  add_ledger_flags(serve, serve_flags, /*with_dir=*/true);
  serve->add_flag("--forensic", forensic, "Serve even if the ledger fails verification");

  // submit
  auto* submit = app.add_subcommand("submit", "Submit a log file");
  TargetFlags submit_target;
  std::string submit_path;
  std::size_t lines_per_chunk = 0;
  std::optional<std::string> file_name;
  std::optional<std::int64_t> ts_from, ts_to;
  bool digest_only = false;
  submit->add_option("path", submit_path, "Log file")->required();
  submit->add_option("--lines", lines_per_chunk, "Split into chunks of N lines")->check(CLI::PositiveNumber);
  submit->add_option("--file-name", file_name, "Recorded file name");
  submit->add_option("--ts-from", ts_from, "First record time (epoch seconds)");
  submit->add_option("--ts-to", ts_to, "Last record time (epoch seconds)");
  submit->add_flag("--digest-only", digest_only, "Send only SHA-256 digests");
  add_target_flags(submit, submit_target);

  // verify
  auto* verify = app.add_subcommand("verify", "Count ledger blocks holding a file or digest");
  TargetFlags verify_target;
  std::string verify_path;
  std::string verify_digest;
  auto* vpath = verify->add_option("path", verify_path, "Log file");
  auto* vdig = verify->add_option("--digest", verify_digest, "SHA-256 digest");
  vpath->excludes(vdig);
  add_target_flags(verify, verify_target);

  // flush
  auto* flush = app.add_subcommand("flush", "Seal the open circled blockchain");
  TargetFlags flush_target;
  add_target_flags(flush, flush_target);

  // validate
  auto* validate = app.add_subcommand("validate", "Verify a ledger directory offline");
  std::string validate_dir;
  validate->add_option("dir", validate_dir, "Ledger directory")->required();

  // inspect
  auto* inspect = app.add_subcommand("inspect", "Search and print blocks");
  TargetFlags inspect_target;
  std::optional<std::uint64_t> q_index;
  std::vector<std::int64_t> q_block_time, q_record_time;
  inspect->add_option("--index", q_index, "Data block index");
  inspect->add_option("--block-time", q_block_time, "FROM TO over block timestamps")->expected(2);
  inspect->add_option("--record-time", q_record_time, "FROM TO over log record times")->expected(2);
  add_target_flags(inspect, inspect_target);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kOperational;
  }

  try {
    if (*serve) {
      LedgerOptions opts;
      opts.forensic = forensic;
      if (hooks.writer_factory) opts.writer_factory = hooks.writer_factory;
      auto [host, port] = split_addr(addr);
      auto ledger = Ledger::open(serve_flags.config(), serve_flags.clock(), opts);
      if (!ledger->load_report().valid) err << "warning: ledger failed verification, serving in forensic mode\n";
      Service service(*ledger);
      if (!service.bind(host, port)) {
        err << "error: cannot bind " << addr << '\n';
        return kOperational;
      }
      {
        std::lock_guard lock(g_serving_mu);
        g_serving = &service;
      }
      out << "listening on " << host << ':' << service.port() << std::endl;
      if (hooks.on_listening) hooks.on_listening(service.port());
      if (!g_stop_requested) service.listen();
      {
        std::lock_guard lock(g_serving_mu);
        g_serving = nullptr;
      }
      g_stop_requested = false;
      return kOk;
    }

    if (*submit) {
      const std::string content = read_all(submit_path);
      if (content.empty()) throw Error(ErrorCode::invalid_argument, submit_path + " is empty");
      auto meta = meta_from(file_name, ts_from, ts_to);
      auto target = make_target(submit_target, /*read_only=*/false);
      const auto chunks = split_chunks(content, lines_per_chunk);
      json results = json::array();
      for (std::size_t i = 0; i < chunks.size(); ++i) {
        IngestReceipt r;
        try {
          r = digest_only ? target->submit_digest(submit_target.ns, compute_hash(chunks[i]), meta)
                          : target->submit_raw(submit_target.ns, chunks[i], meta);
        } catch (const std::exception& e) {
          err << "error: chunk " << (i + 1) << " of " << chunks.size() << " failed: " << e.what() << '\n';
          return kOperational;
        }
        if (as_json) {
          results.push_back({{"chunk", i + 1}, {"block_index", r.block_index}, {"timestamp", r.timestamp}});
        } else {
          out << "chunk " << (i + 1) << ": block_index=" << r.block_index << " timestamp=" << r.timestamp << '\n';
        }
      }
      if (as_json) out << results.dump() << '\n';
      return kOk;
    }

    if (*verify) {
      HexDigest digest;
      if (!verify_digest.empty()) {
        digest = HexDigest::from_string(verify_digest);
      } else if (!verify_path.empty()) {
        digest = compute_hash(read_all(verify_path));
      } else {
        err << "error: give a file path or --digest\n";
        return kOperational;
      }
      auto target = make_target(verify_target, /*read_only=*/true);
      const std::uint64_t n = target->count(verify_target.ns, digest);
      if (as_json) {
        out << json{{"digest", digest.str()}, {"count", n}}.dump() << '\n';
      } else {
        out << "count=" << n << '\n';
      }
      return n >= 1 ? kOk : kNegative;
    }

    if (*flush) {
      auto target = make_target(flush_target, /*read_only=*/false);
      auto sb = target->flush(flush_target.ns);
      if (as_json) {
        out << json{{"sealed", sb.has_value()}, {"superblock", sb ? block_to_json(*sb) : json(nullptr)}}.dump()
            << '\n';
      } else if (sb) {
        out << "sealed: superblock index=" << sb->index << " hash=" << sb->current_hash.str() << '\n';
      } else {
        out << "nothing to seal: open circled blockchain has no data blocks\n";
      }
      return kOk;
    }

    if (*validate) {
      LedgerConfig cfg;
      cfg.ledger_dir = validate_dir;
      LedgerOptions opts;
      opts.read_only = true;
      opts.forensic = true;
      auto ledger = Ledger::open(cfg, system_clock(), opts);
      const LoadReport& load = ledger->load_report();
      if (as_json) {
        json nss = json::object();
        for (const auto& [ns, nl] : load.namespaces) nss[ns] = report_json(nl.report);
        out << json{{"valid", load.valid}, {"namespaces", std::move(nss)}}.dump() << '\n';
      } else {
        for (const auto& [ns, nl] : load.namespaces) {
          const auto& r = nl.report;
          out << "namespace " << ns << ": " << (r.valid ? "valid" : "INVALID")
              << " checked_blocks=" << r.checked_blocks << " hash_computations=" << r.hash_computations << '\n';
          for (const auto& f : r.failures) {
            out << "  block_index=" << f.block_index << " level=" << to_string(f.level)
                << " reason=" << to_string(f.reason) << '\n';
          }
          if (nl.dropped_tail_line) out << "  note: unterminated line " << *nl.dropped_tail_line << " ignored\n";
        }
        out << (load.valid ? "ledger valid" : "ledger INVALID") << '\n';
      }
      return load.valid ? kOk : kNegative;
    }

    if (*inspect) {
      SearchQuery q;
      q.block_index = q_index;
      if (!q_block_time.empty()) q.block_time = Interval{q_block_time[0], q_block_time[1]};
      if (!q_record_time.empty()) q.record_time = Interval{q_record_time[0], q_record_time[1]};
      q.validate();
      auto target = make_target(inspect_target, /*read_only=*/true);
      const auto hits = target->search(inspect_target.ns, q);
      if (as_json) {
        json results = json::array();
        for (const auto& h : hits) {
          results.push_back({{"block", block_to_json(h.block)},
                             {"terminal", h.terminal ? block_to_json(*h.terminal) : json(nullptr)},
                             {"sealed", h.sealed()},
                             {"cb_ordinal", h.cb_ordinal}});
        }
        out << results.dump() << '\n';
      } else {
        for (const auto& h : hits) {
          print_block(out, h.block);
          if (h.terminal) {
            print_block(out, *h.terminal, "  ");
          } else {
            out << "  (circled blockchain still open)\n";
          }
        }
        out << hits.size() << " block(s)\n";
      }
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kOperational;
  }
  return kOperational;
}

}  // namespace lcaas::cli
