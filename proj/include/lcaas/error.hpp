#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lcaas {

enum class ErrorCode {
  invalid_argument,
  chain_sealed,
  capacity_exceeded,
  empty_chain,
  not_superblock,
  not_terminal,
  mining_exhausted,
  corrupt_record,
  invalid_ledger,
  io_error,
  store_raw_disabled,
  locked,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lcaas
