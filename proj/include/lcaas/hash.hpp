#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include "lcaas/hex_digest.hpp"

namespace lcaas {

/// Lowercase hex SHA-256 of `bytes`.
HexDigest compute_hash(std::span<const std::uint8_t> bytes);
HexDigest compute_hash(std::string_view bytes);

bool meets_difficulty(const HexDigest& h, unsigned difficulty) noexcept;

/// Counts SHA-256 evaluations performed on behalf of a verification pass.
class HashCounter {
 public:
  HexDigest operator()(std::string_view bytes) {
    ++count_;
    return compute_hash(bytes);
  }
  std::uint64_t count() const noexcept { return count_; }

 private:
  std::uint64_t count_ = 0;
};

}  // namespace lcaas
