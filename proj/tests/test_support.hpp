#pragma once

#include <stdlib.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lcaas/error.hpp"
#include "lcaas/hash.hpp"
#include "lcaas/ledger.hpp"
#include "lcaas/record.hpp"

namespace lcaas::testing {

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "lcaas-test-XXXXXX").string();
    path_ = ::mkdtemp(tmpl.data());
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// A clock tests can move by hand.
struct ManualClock {
  std::shared_ptr<std::int64_t> now = std::make_shared<std::int64_t>(1'500'000'000);

  Clock clock() const {
    return [now = now] { return *now; };
  }
  void advance(std::int64_t seconds) { *now += seconds; }
};

inline LedgerConfig config_for(const std::filesystem::path& dir, std::size_t max_blocks = 10,
                               unsigned difficulty = 1) {
  LedgerConfig cfg;
  cfg.ledger_dir = dir;
  cfg.max_blocks_per_cb = max_blocks;
  cfg.difficulty = difficulty;
  return cfg;
}

inline HexDigest digest_of(std::size_t i) { return compute_hash("log entry " + std::to_string(i)); }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

inline std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t nl = s.find('\n', pos);
    if (nl == std::string::npos) nl = s.size();
    lines.push_back(s.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

inline std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + '\n';
  return out;
}

/// JSON pointers to every mutable scalar inside a record's block: the six
/// block fields plus every payload field (recursing into superblocks).
inline std::vector<nlohmann::json::json_pointer> mutable_fields(const nlohmann::json& record) {
  using nlohmann::json;
  std::vector<json::json_pointer> out;
  const json flat = record.flatten();
  for (const auto& [path, value] : flat.items()) {
    if (path.rfind("/block/", 0) != 0) continue;
    if (path == "/block/kind" || path.ends_with("/kind")) continue;  // variant tags are structure
    if (value.is_null()) continue;                                    // genesis payload
    out.emplace_back(path);
  }
  return out;
}

/// Changes one scalar so the record still parses. Returns false if no
/// parse-preserving change was found.
inline bool mutate_field(nlohmann::json& record, const nlohmann::json::json_pointer& ptr, std::mt19937_64& rng) {
  using nlohmann::json;
  const json original = record[ptr];
  for (int attempt = 0; attempt < 64; ++attempt) {
    json changed = original;
    if (original.is_string()) {
      std::string s = original.get<std::string>();
      if (HexDigest::is_valid(s)) {
        static constexpr char kHex[] = "0123456789abcdef";
        const std::size_t pos = rng() % s.size();
        char c;
        do c = kHex[rng() % 16]; while (c == s[pos]);
        s[pos] = c;
      } else {
        s += static_cast<char>('a' + rng() % 26);
      }
      changed = s;
    } else if (original.is_number_unsigned()) {
      const std::uint64_t v = original.get<std::uint64_t>();
      const std::uint64_t delta = 1 + rng() % (attempt < 16 ? 1000 : 3);
      changed = (rng() % 2 == 0 || v < delta) ? v + delta : v - delta;
    } else if (original.is_number_integer()) {
      const std::int64_t delta = 1 + static_cast<std::int64_t>(rng() % (attempt < 16 ? 1000 : 3));
      changed = original.get<std::int64_t>() + (rng() % 2 == 0 ? delta : -delta);
    } else {
      return false;
    }
    record[ptr] = changed;
    try {
      (void)parse_line(record.dump());
      return true;
    } catch (const Error&) {
      record[ptr] = original;
    }
  }
  return false;
}

}  // namespace lcaas::testing
