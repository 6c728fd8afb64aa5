#include <gtest/gtest.h>

#include <thread>

#include <httplib.h>

#include "lcaas/service.hpp"
#include "test_support.hpp"

using namespace lcaas;
using namespace lcaas::testing;
using nlohmann::json;

namespace {

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override { start(config_for(dir.path(), 3)); }
  void TearDown() override { stop(); }

  void start(LedgerConfig cfg, LedgerOptions opts = {}) {
    ledger = Ledger::open(std::move(cfg), clock.clock(), std::move(opts));
    service = std::make_unique<Service>(*ledger);
    ASSERT_TRUE(service->bind("127.0.0.1", 0));
    thread = std::thread([this] { service->listen(); });
    client = std::make_unique<httplib::Client>("127.0.0.1", service->port());
    for (int i = 0; i < 200 && !service->running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }

  void stop() {
    if (!service) return;
    service->stop();
    thread.join();
    service.reset();
    ledger.reset();
  }

  // Returns {status, parsed body}.
  std::pair<int, json> post(const std::string& path, const std::string& body,
                            const std::string& type = "application/json",
                            const httplib::Headers& headers = {}) {
    auto res = client->Post(path, headers, body, type);
    EXPECT_TRUE(res) << path;
    if (!res) return {0, json()};
    return {res->status, json::parse(res->body)};
  }
  std::pair<int, json> post_json(const std::string& path, const json& body) { return post(path, body.dump()); }
  std::pair<int, json> get(const std::string& path) {
    auto res = client->Get(path);
    EXPECT_TRUE(res) << path;
    if (!res) return {0, json()};
    return {res->status, json::parse(res->body)};
  }

  static void expect_error(const std::pair<int, json>& r, int status, const std::string& code) {
    EXPECT_EQ(r.first, status);
    EXPECT_EQ(r.second["status"], "failed");
    EXPECT_EQ(r.second["error"]["code"], code) << r.second.dump();
    EXPECT_TRUE(r.second["error"]["message"].is_string());
  }

  TempDir dir;
  ManualClock clock;
  std::unique_ptr<Ledger> ledger;
  std::unique_ptr<Service> service;
  std::unique_ptr<httplib::Client> client;
  std::thread thread;
};

}  // namespace

TEST_F(ServiceTest, SubmitRawThenVerifyRaw) {
  auto [status, body] = post("/submit_raw?file_name=a.log&ts_from=5&ts_to=9", "line one\n", "text/plain");
  ASSERT_EQ(status, 200) << body.dump();
  EXPECT_EQ(body["status"], "success");
  EXPECT_EQ(body["block_index"], 1);
  EXPECT_EQ(body["timestamp"], *clock.now);
  EXPECT_EQ(body["digest"], compute_hash("line one\n").str());
  EXPECT_EQ(body["namespace"], "default");
  EXPECT_EQ(body["stored"], false);

  auto found = post("/verify_raw", "line one\n", "text/plain");
  EXPECT_EQ(found.second["count"], 1);
  EXPECT_EQ(found.second["locations"][0]["block_index"], 1);
  EXPECT_EQ(found.second["locations"][0]["sealed"], false);

  auto missing = post("/verify_raw", "line two\n", "text/plain");
  EXPECT_EQ(missing.first, 200);
  EXPECT_EQ(missing.second["count"], 0);

  auto hits = post_json("/search", json{{"record_time", {{"from", 8}, {"to", 20}}}});
  ASSERT_EQ(hits.second["count"], 1);
  EXPECT_EQ(hits.second["results"][0]["block"]["data"]["fields"]["meta"]["file_name"], "a.log");
}

TEST_F(ServiceTest, SubmitRawMultipart) {
  httplib::MultipartFormDataItems items = {{"file", "multi\npart\n", "x.log", "text/plain"},
                                           {"file_name", "x.log", "", ""}};
  auto res = client->Post("/submit_raw", items);
  ASSERT_TRUE(res);
  json body = json::parse(res->body);
  ASSERT_EQ(res->status, 200) << res->body;
  EXPECT_EQ(body["digest"], compute_hash("multi\npart\n").str());
  auto hit = post_json("/search", json{{"block_index", 1}});
  EXPECT_EQ(hit.second["results"][0]["block"]["data"]["fields"]["meta"]["file_name"], "x.log");
}

TEST_F(ServiceTest, SubmitDigestAndVerifyDigest) {
  const std::string d = digest_of(1).str();
  for (int i = 0; i < 2; ++i) ASSERT_EQ(post_json("/submit_digest", json{{"digest", d}}).first, 200);
  auto r = post_json("/verify_digest", json{{"digest", d}});
  EXPECT_EQ(r.second["count"], 2);
  EXPECT_EQ(r.second["digest"], d);
}

TEST_F(ServiceTest, ErrorCodes) {
  expect_error(post("/submit_raw", "", "text/plain"), 400, "empty_body");
  expect_error(post_json("/submit_digest", json{{"digest", "xyz"}}), 400, "malformed_digest");
  expect_error(post_json("/submit_digest", json{{"digest", std::string(64, 'A')}}), 400, "malformed_digest");
  expect_error(post("/submit_digest", "not json"), 400, "malformed_digest");
  expect_error(post_json("/submit_digest", json{{"digest", digest_of(1).str()}, {"ts_from", 9}, {"ts_to", 1}}), 400,
               "invalid_meta");
  expect_error(post("/submit_raw?ts_from=abc", "x", "text/plain"), 400, "invalid_meta");
  expect_error(post_json("/verify_digest", json::object()), 400, "malformed_digest");
  expect_error(post_json("/search", json::object()), 400, "bad_query");
  expect_error(post_json("/search", json{{"block_index", 1}, {"block_time", {{"from", 1}, {"to", 2}}}}), 400,
               "bad_query");
  expect_error(post_json("/search", json{{"block_time", {{"from", 5}, {"to", 2}}}}), 400, "bad_query");
  expect_error(post_json("/verify_tb", json{{"nonce", 1}}), 400, "not_terminal");
  expect_error(post("/submit_raw?namespace=bad/ns", "x", "text/plain"), 400, "invalid_namespace");
  expect_error(get("/nope"), 404, "not_found");
  EXPECT_EQ(ledger->stats("default").data_blocks, 0u);
}

TEST_F(ServiceTest, VerifyTbRoundTripAndFlush) {
  for (int i = 0; i < 2; ++i) post_json("/submit_digest", json{{"digest", digest_of(i).str()}});
  auto flushed = post("/flush", "");
  ASSERT_EQ(flushed.second["sealed"], true);
  const json sb = flushed.second["superblock"];
  json tb = sb["data"]["fields"];
  // Rebuild the terminal block from the superblock's embedded fields.
  json terminal = {{"nonce", tb["nonce"]},
                   {"index", tb["index"]},
                   {"timestamp", tb["timestamp"]},
                   {"kind", "terminal"},
                   {"data", tb["data"]},
                   {"previous_hash", tb["previous_hash"]},
                   {"current_hash", tb["current_hash"]}};
  auto ok = post_json("/verify_tb", terminal);
  ASSERT_EQ(ok.first, 200) << ok.second.dump();
  EXPECT_EQ(ok.second["found"], true);
  EXPECT_EQ(ok.second["hash_valid"], true);
  EXPECT_EQ(ok.second["aggr_valid"], true);
  EXPECT_EQ(ok.second["count"], 1);
  EXPECT_EQ(ok.second["superblock_index"], 0);

  terminal["timestamp"] = terminal["timestamp"].get<std::int64_t>() + 1;
  auto bad = post_json("/verify_tb", terminal);
  EXPECT_EQ(bad.second["hash_valid"], false);

  auto search = post_json("/search", json{{"block_index", 1}});
  EXPECT_EQ(search.second["results"][0]["sealed"], true);
  EXPECT_EQ(search.second["results"][0]["terminal"]["current_hash"], tb["current_hash"]);

  EXPECT_EQ(post("/flush", "").second["sealed"], false);
}

TEST_F(ServiceTest, NamespacesAreIsolated) {
  const std::string d = digest_of(7).str();
  post_json("/submit_digest?namespace=alpha", json{{"digest", d}});
  post("/submit_digest", json{{"digest", d}}.dump(), "application/json", {{"X-Lcaas-Namespace", "beta"}});
  post_json("/submit_digest", json{{"digest", d}, {"namespace", "beta"}});
  EXPECT_EQ(post_json("/verify_digest?namespace=alpha", json{{"digest", d}}).second["count"], 1);
  EXPECT_EQ(post_json("/verify_digest", json{{"digest", d}, {"namespace", "beta"}}).second["count"], 2);
  EXPECT_EQ(post_json("/verify_digest", json{{"digest", d}}).second["count"], 0);

  auto stats = get("/stats?namespace=beta");
  EXPECT_EQ(stats.second["data_blocks"], 2);
  EXPECT_EQ(stats.second["namespaces"]["alpha"]["data_blocks"], 1);
  EXPECT_EQ(stats.second["difficulty"], 1);
}

TEST_F(ServiceTest, HealthAndStats) {
  auto h = get("/health");
  EXPECT_EQ(h.second["health"], "ok");
  EXPECT_EQ(h.second["alive"], true);
  EXPECT_EQ(h.second["ledger_valid"], true);
  for (int i = 0; i < 4; ++i) post_json("/submit_digest", json{{"digest", digest_of(i).str()}});
  auto s = get("/stats");
  EXPECT_EQ(s.second["data_blocks"], 4);
  EXPECT_EQ(s.second["sealed_cbs"], 1);
  EXPECT_EQ(s.second["superblocks"], 1);
  EXPECT_EQ(s.second["open_cb_size"], 1);
}

TEST_F(ServiceTest, StoreRawWritesBlob) {
  stop();
  auto cfg = config_for(dir.path(), 3);
  cfg.store_raw = true;
  start(cfg);
  auto r = post("/submit_raw", "keep me", "text/plain");
  EXPECT_EQ(r.second["stored"], true);
  EXPECT_EQ(read_text(dir / "blobs" / compute_hash("keep me").str()), "keep me");
}

TEST_F(ServiceTest, ForensicLedgerReportsDegraded) {
  post_json("/submit_digest", json{{"digest", digest_of(1).str()}});
  post_json("/submit_digest", json{{"digest", digest_of(2).str()}});
  stop();
  const auto file = dir / "default.ledger.jsonl";
  auto lines = split_lines(read_text(file));
  auto rec = json::parse(lines[1]);
  rec["block"]["nonce"] = rec["block"]["nonce"].get<std::uint64_t>() + 1;
  lines[1] = rec.dump();
  write_text(file, join_lines(lines));

  LedgerOptions opts;
  opts.forensic = true;
  start(config_for(dir.path(), 3), opts);
  auto h = get("/health");
  EXPECT_EQ(h.second["health"], "degraded");
  EXPECT_EQ(h.second["ledger_valid"], false);
  EXPECT_EQ(h.second["load_failures"][0]["block_index"], 1);
  EXPECT_EQ(get("/stats").second["ledger_valid"], false);
}

TEST_F(ServiceTest, SecondBindOnSamePortFails) {
  Service other(*ledger);
  EXPECT_FALSE(other.bind("127.0.0.1", service->port()));
}

TEST(ServiceHelpers, ResponseShapes) {
  EXPECT_EQ(success_response({{"a", 1}}), (json{{"a", 1}, {"status", "success"}}));
  EXPECT_EQ(failure_response("x", "y"), (json{{"status", "failed"}, {"error", {{"code", "x"}, {"message", "y"}}}}));
}
