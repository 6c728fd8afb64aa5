#include "lcaas/hex_digest.hpp"

#include <algorithm>

#include "lcaas/error.hpp"

namespace lcaas {

namespace {
bool is_lower_hex(char c) noexcept { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); }
}  // namespace

bool HexDigest::is_valid(std::string_view text) noexcept {
  return text.size() == kLength && std::all_of(text.begin(), text.end(), is_lower_hex);
}

std::optional<HexDigest> HexDigest::parse(std::string_view text) {
  if (!is_valid(text)) return std::nullopt;
  return HexDigest(std::string(text));
}

HexDigest HexDigest::from_string(std::string_view text) {
  auto d = parse(text);
  if (!d) {
    throw Error(ErrorCode::invalid_argument,
                "malformed digest: expected 64 lowercase hex characters");
  }
  return *std::move(d);
}

bool HexDigest::is_zero() const noexcept { return has_leading_zeros(kLength); }

bool HexDigest::has_leading_zeros(unsigned difficulty) const noexcept {
  if (difficulty > kLength) return false;
  return std::all_of(value_.begin(), value_.begin() + difficulty, [](char c) { return c == '0'; });
}

}  // namespace lcaas
