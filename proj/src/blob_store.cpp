#include "lcaas/blob_store.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

#include "lcaas/error.hpp"
#include "lcaas/hash.hpp"

namespace lcaas {

namespace fs = std::filesystem;

BlobStore::BlobStore(fs::path root, bool enabled) : root_(std::move(root)), enabled_(enabled) {}

HexDigest BlobStore::store(std::string_view content) {
  if (!enabled_) throw Error(ErrorCode::store_raw_disabled, "raw log storage is disabled");
  HexDigest digest = compute_hash(content);
  const fs::path target = root_ / digest.str();
  std::error_code ec;
  if (fs::exists(target, ec)) return digest;

  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create " + root_.string() + ": " + ec.message());
  // Write-then-rename so a blob is either absent or complete.
  const fs::path tmp = root_ / (digest.str() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot rename " + tmp.string() + ": " + ec.message());
  return digest;
}

bool BlobStore::contains(const HexDigest& digest) const {
  std::error_code ec;
  return fs::exists(root_ / digest.str(), ec);
}

std::optional<std::string> BlobStore::load(const HexDigest& digest) const {
  std::ifstream in(root_ / digest.str(), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace lcaas
