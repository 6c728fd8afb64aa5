#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "lcaas/hex_digest.hpp"

namespace lcaas {

/// Content-addressed store: <root>/<sha256 of contents>.
class BlobStore {
 public:
  BlobStore(std::filesystem::path root, bool enabled);

  bool enabled() const noexcept { return enabled_; }
  const std::filesystem::path& root() const noexcept { return root_; }

  /// Idempotent. Throws Error(store_raw_disabled) or Error(io_error).
  HexDigest store(std::string_view content);
  bool contains(const HexDigest& digest) const;
  std::optional<std::string> load(const HexDigest& digest) const;

 private:
  std::filesystem::path root_;
  bool enabled_;
};

}  // namespace lcaas
