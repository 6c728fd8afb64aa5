#include "lcaas/hash.hpp"

#include <openssl/sha.h>

#include <array>

namespace lcaas {

HexDigest compute_hash(std::span<const std::uint8_t> bytes) {
  std::array<unsigned char, SHA256_DIGEST_LENGTH> md{};
  SHA256(bytes.data(), bytes.size(), md.data());

  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(HexDigest::kLength, '0');
  for (std::size_t i = 0; i < md.size(); ++i) {
    out[2 * i] = kHex[md[i] >> 4];
    out[2 * i + 1] = kHex[md[i] & 0x0f];
  }
  return HexDigest::from_string(out);
}

HexDigest compute_hash(std::string_view bytes) {
  return compute_hash(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

bool meets_difficulty(const HexDigest& h, unsigned difficulty) noexcept {
  return h.has_leading_zeros(difficulty);
}

}  // namespace lcaas
