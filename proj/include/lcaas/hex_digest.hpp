#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace lcaas {

/// A SHA-256 value in canonical form: 64 lowercase hexadecimal characters.
class HexDigest {
 public:
  /// The all-zero digest (ZERO_HASH).
  HexDigest() : value_(kLength, '0') {}

  static constexpr std::size_t kLength = 64;

  static bool is_valid(std::string_view text) noexcept;
  static std::optional<HexDigest> parse(std::string_view text);
  /// Throws Error(invalid_argument) on malformed input.
  static HexDigest from_string(std::string_view text);
  static HexDigest zero() { return HexDigest{}; }

  const std::string& str() const noexcept { return value_; }
  bool is_zero() const noexcept;
  /// True iff the first `difficulty` characters are '0'.
  bool has_leading_zeros(unsigned difficulty) const noexcept;

  friend bool operator==(const HexDigest&, const HexDigest&) = default;
  friend std::strong_ordering operator<=>(const HexDigest& a, const HexDigest& b) {
    return a.value_.compare(b.value_) <=> 0;
  }

 private:
  explicit HexDigest(std::string value) : value_(std::move(value)) {}

  std::string value_;
};

}  // namespace lcaas

template <>
struct std::hash<lcaas::HexDigest> {
  std::size_t operator()(const lcaas::HexDigest& d) const noexcept {
    return std::hash<std::string>{}(d.str());
  }
};
