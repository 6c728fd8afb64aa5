#include "lcaas/service.hpp"

#include <sys/socket.h>

#include <charconv>

#include <httplib.h>

#include "lcaas/error.hpp"
#include "lcaas/hash.hpp"
#include "lcaas/record.hpp"

namespace lcaas {

using nlohmann::json;

namespace {

constexpr const char* kNamespaceHeader = "X-Lcaas-Namespace";

// Raised inside handlers; turned into a failed ApiResponse.
struct ApiError {
  int http_status;
  std::string code;
  std::string message;
};

[[noreturn]] void fail(int status, std::string code, std::string message) {
  throw ApiError{status, std::move(code), std::move(message)};
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::optional<std::string> param(const httplib::Request& req, const std::string& key) {
  if (req.has_param(key)) return req.get_param_value(key);
  if (req.is_multipart_form_data() && req.has_file(key)) return req.get_file_value(key).content;
  return std::nullopt;
}

std::string resolve_namespace(const httplib::Request& req, const json* body = nullptr) {
  std::string ns = "default";
  if (auto p = param(req, "namespace")) {
    ns = *p;
  } else if (req.has_header(kNamespaceHeader)) {
    ns = req.get_header_value(kNamespaceHeader);
  } else if (body && body->is_object() && body->contains("namespace")) {
    if (!(*body)["namespace"].is_string()) fail(400, "invalid_namespace", "namespace must be a string");
    ns = (*body)["namespace"].get<std::string>();
  }
  if (!is_valid_namespace(ns)) fail(400, "invalid_namespace", "namespace must match [A-Za-z0-9_-]{1,64}");
  return ns;
}

// Raw upload: the "file" part of a multipart form, otherwise the whole body.
std::string raw_content(const httplib::Request& req) {
  std::string content;
  if (req.is_multipart_form_data()) {
    if (req.has_file("file")) content = req.get_file_value("file").content;
  } else {
    content = req.body;
  }
  if (content.empty()) fail(400, "empty_body", "request body is empty");
  return content;
}

json parse_json_body(const httplib::Request& req, std::string_view code_on_error) {
  if (req.body.empty()) fail(400, "empty_body", "request body is empty");
  json j = json::parse(req.body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) fail(400, std::string(code_on_error), "body must be a JSON object");
  return j;
}

HexDigest digest_field(const json& body) {
  if (!body.contains("digest") || !body["digest"].is_string()) {
    fail(400, "malformed_digest", "\"digest\" must be a string");
  }
  auto d = HexDigest::parse(body["digest"].get_ref<const std::string&>());
  if (!d) fail(400, "malformed_digest", "digest must be 64 lowercase hexadecimal characters");
  return *d;
}

std::int64_t parse_epoch(std::string_view text, const char* name) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(400, "invalid_meta", std::string(name) + " must be an integer epoch");
  }
  return v;
}

std::optional<LogMeta> finish_meta(LogMeta meta) {
  if (meta.file_name) {
    try {
      (void)json(*meta.file_name).dump();
    } catch (const json::exception&) {
      fail(400, "invalid_meta", "file_name must be valid UTF-8");
    }
  }
  if (!meta.well_formed()) fail(400, "invalid_meta", "ts_from must not exceed ts_to");
  if (meta.empty()) return std::nullopt;
  return meta;
}

std::optional<LogMeta> meta_from_params(const httplib::Request& req) {
  LogMeta meta;
  meta.file_name = param(req, "file_name");
  if (auto v = param(req, "ts_from")) meta.ts_from = parse_epoch(*v, "ts_from");
  if (auto v = param(req, "ts_to")) meta.ts_to = parse_epoch(*v, "ts_to");
  return finish_meta(std::move(meta));
}

std::optional<LogMeta> meta_from_json(const json& body) {
  LogMeta meta;
  if (body.contains("file_name")) {
    if (!body["file_name"].is_string()) fail(400, "invalid_meta", "file_name must be a string");
    meta.file_name = body["file_name"].get<std::string>();
  }
  for (const char* key : {"ts_from", "ts_to"}) {
    if (!body.contains(key)) continue;
    if (!body[key].is_number_integer()) fail(400, "invalid_meta", std::string(key) + " must be an integer");
    (std::string_view(key) == "ts_from" ? meta.ts_from : meta.ts_to) = body[key].get<std::int64_t>();
  }
  return finish_meta(std::move(meta));
}

json matches_json(const DigestMatches& m) {
  json locations = json::array();
  for (const auto& l : m.locations) {
    locations.push_back({{"block_index", l.block_index}, {"cb_ordinal", l.cb_ordinal}, {"sealed", l.sealed}});
  }
  return {{"count", m.count}, {"locations", std::move(locations)}};
}

Interval interval_field(const json& v) {
  if (!v.is_object() || !v.contains("from") || !v.contains("to") || !v["from"].is_number_integer() ||
      !v["to"].is_number_integer()) {
    fail(400, "bad_query", "interval must be {\"from\": int, \"to\": int}");
  }
  return {v["from"].get<std::int64_t>(), v["to"].get<std::int64_t>()};
}

SearchQuery query_from_json(const json& body) {
  SearchQuery q;
  if (body.contains("block_index")) {
    if (!body["block_index"].is_number_unsigned()) fail(400, "bad_query", "block_index must be a non-negative integer");
    q.block_index = body["block_index"].get<std::uint64_t>();
  }
  if (body.contains("block_time")) q.block_time = interval_field(body["block_time"]);
  if (body.contains("record_time")) q.record_time = interval_field(body["record_time"]);
  try {
    q.validate();
  } catch (const Error& e) {
    fail(400, "bad_query", e.what());
  }
  return q;
}

json stats_json(const NamespaceStats& s) {
  return {{"data_blocks", s.data_blocks},
          {"sealed_cbs", s.sealed_cbs},
          {"superblocks", s.superblocks},
          {"open_cb_size", s.open_cb_size}};
}

}  // namespace

json success_response(json fields) {
  fields["status"] = "success";
  return fields;
}

json failure_response(std::string_view code, std::string_view message) {
  return {{"status", "failed"}, {"error", {{"code", code}, {"message", message}}}};
}

struct Service::Impl {
  explicit Impl(Ledger& l) : ledger(l) {}

  using Handler = std::function<json(const httplib::Request&)>;

  // Wraps a handler so every outcome is a well-formed ApiResponse.
  httplib::Server::Handler wrap(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
      try {
        reply(res, 200, success_response(h(req)));
      } catch (const ApiError& e) {
        reply(res, e.http_status, failure_response(e.code, e.message));
      } catch (const std::exception& e) {
        reply(res, 500, failure_response("internal", e.what()));
      }
    };
  }

  json submit(const std::string& ns, const HexDigest& digest, std::optional<LogMeta> meta) {
    IngestReceipt r = ledger.ingest(ns, digest, std::move(meta));
    return {{"timestamp", r.timestamp}, {"block_index", r.block_index}, {"digest", digest.str()},
            {"namespace", ns}};
  }

  void routes() {
    server.Post("/submit_raw", wrap([this](const httplib::Request& req) {
      const std::string ns = resolve_namespace(req);
      const std::string content = raw_content(req);
      auto meta = meta_from_params(req);
      HexDigest digest = compute_hash(content);
      bool stored = false;
      if (ledger.blobs().enabled()) {
        ledger.store_raw(content);
        stored = true;
      }
      json out = submit(ns, digest, std::move(meta));
      out["stored"] = stored;
      return out;
    }));

    server.Post("/submit_digest", wrap([this](const httplib::Request& req) {
      json body = parse_json_body(req, "malformed_digest");
      const std::string ns = resolve_namespace(req, &body);
      HexDigest digest = digest_field(body);
      return submit(ns, digest, meta_from_json(body));
    }));

    server.Post("/verify_raw", wrap([this](const httplib::Request& req) {
      const std::string ns = resolve_namespace(req);
      HexDigest digest = compute_hash(raw_content(req));
      json out = matches_json(ledger.find_by_digest(ns, digest));
      out["digest"] = digest.str();
      return out;
    }));

    server.Post("/verify_digest", wrap([this](const httplib::Request& req) {
      json body = parse_json_body(req, "malformed_digest");
      const std::string ns = resolve_namespace(req, &body);
      HexDigest digest = digest_field(body);
      json out = matches_json(ledger.find_by_digest(ns, digest));
      out["digest"] = digest.str();
      return out;
    }));

    server.Post("/verify_tb", wrap([this](const httplib::Request& req) {
      json body = parse_json_body(req, "not_terminal");
      const std::string ns = resolve_namespace(req, &body);
      body.erase("namespace");
      Block tb;
      try {
        tb = block_from_json(body);
      } catch (const Error& e) {
        fail(400, "not_terminal", std::string("body is not a terminal block: ") + e.what());
      }
      if (tb.kind != BlockKind::terminal) fail(400, "not_terminal", "block kind must be terminal");
      TbReport r = ledger.verify_tb(ns, tb);
      json out = {{"found", r.found},
                  {"hash_valid", r.hash_valid},
                  {"aggr_valid", r.aggr_valid},
                  {"count", r.found ? 1 : 0},
                  {"superblock_index", nullptr}};
      if (r.superblock_index) out["superblock_index"] = *r.superblock_index;
      return out;
    }));

    server.Post("/search", wrap([this](const httplib::Request& req) {
      json body = parse_json_body(req, "bad_query");
      const std::string ns = resolve_namespace(req, &body);
      body.erase("namespace");
      SearchQuery q = query_from_json(body);
      json results = json::array();
      for (const SearchHit& h : ledger.search(ns, q)) {
        results.push_back({{"block", block_to_json(h.block)},
                           {"terminal", h.terminal ? block_to_json(*h.terminal) : json(nullptr)},
                           {"sealed", h.sealed()},
                           {"cb_ordinal", h.cb_ordinal}});
      }
      return json{{"count", results.size()}, {"results", std::move(results)}};
    }));

    server.Post("/flush", wrap([this](const httplib::Request& req) {
      json body = req.body.empty() ? json::object() : parse_json_body(req, "bad_request");
      const std::string ns = resolve_namespace(req, &body);
      auto sb = ledger.flush(ns);
      return json{{"sealed", sb.has_value()}, {"superblock", sb ? block_to_json(*sb) : json(nullptr)}};
    }));

    server.Get("/stats", wrap([this](const httplib::Request& req) {
      const std::string ns = resolve_namespace(req);
      const LedgerConfig& cfg = ledger.config();
      json out = stats_json(ledger.stats(ns));
      json all = json::object();
      for (const auto& name : ledger.namespaces()) all[name] = stats_json(ledger.stats(name));
      out["namespace"] = ns;
      out["namespaces"] = std::move(all);
      out["difficulty"] = cfg.difficulty;
      out["max_blocks_per_cb"] = cfg.max_blocks_per_cb;
      out["max_open_window_seconds"] = cfg.max_open_window_seconds;
      out["store_raw"] = cfg.store_raw;
      out["ledger_valid"] = ledger.load_report().valid;
      return out;
    }));

    server.Get("/health", wrap([this](const httplib::Request&) {
      const LoadReport& load = ledger.load_report();
      json failures = json::array();
      for (const auto& [ns, nl] : load.namespaces) {
        for (const auto& f : nl.report.failures) {
          failures.push_back({{"namespace", ns},
                              {"block_index", f.block_index},
                              {"level", to_string(f.level)},
                              {"reason", to_string(f.reason)}});
        }
      }
      return json{{"health", load.valid ? "ok" : "degraded"},
                  {"alive", true},
                  {"ledger_valid", load.valid},
                  {"load_failures", std::move(failures)}};
    }));

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) reply(res, res.status, failure_response("not_found", "no such endpoint"));
    });
  }

  Ledger& ledger;
  httplib::Server server;
  int port = 0;
};

Service::Service(Ledger& ledger) : impl_(std::make_unique<Impl>(ledger)) {
  // SO_REUSEPORT (httplib's default) would let a second server share the port.
  impl_->server.set_socket_options([](auto sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  impl_->routes();
}

Service::~Service() { stop(); }

bool Service::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
    return impl_->port > 0;
  }
  if (!impl_->server.bind_to_port(host, port)) return false;
  impl_->port = port;
  return true;
}

int Service::port() const noexcept { return impl_->port; }

void Service::listen() { impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_) impl_->server.stop();
}

bool Service::running() const { return impl_->server.is_running(); }

}  // namespace lcaas
