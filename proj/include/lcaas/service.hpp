#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "lcaas/ledger.hpp"

namespace lcaas {

/// HTTP/1.1 front end. The API functions are POST endpoints with JSON
/// responses of the form {"status":"success",...} or
/// {"status":"failed","error":{"code":...,"message":...}}.
///
///   POST /submit_raw     raw or multipart body; file_name, ts_from, ts_to params
///   POST /submit_digest  {"digest", "file_name"?, "ts_from"?, "ts_to"?}
///   POST /verify_raw     raw or multipart body
///   POST /verify_digest  {"digest"}
///   POST /verify_tb      terminal block JSON
///   POST /search         {"block_index"} | {"block_time":{from,to}} | {"record_time":{from,to}}
///   POST /flush          seal the open chain
///   GET  /stats, /health
///
/// The namespace comes from the "namespace" query parameter, the
/// X-Lcaas-Namespace header or a "namespace" body field, else "default".
class Service {
 public:
  explicit Service(Ledger& ledger);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Returns false when the address cannot be bound. Port 0 picks a free port.
  bool bind(const std::string& host, int port);
  int port() const noexcept;
  /// Blocks until stop().
  void listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

nlohmann::json success_response(nlohmann::json fields = nlohmann::json::object());
nlohmann::json failure_response(std::string_view code, std::string_view message);

}  // namespace lcaas
