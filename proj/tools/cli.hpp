#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "lcaas/ledger.hpp"

namespace lcaas::cli {

/// Stable exit codes for scripting.
enum Exit : int { kOk = 0, kNegative = 1, kOperational = 2 };

struct Hooks {
  /// Called once `serve` is bound, with the actual port.
  std::function<void(int port)> on_listening;
  /// Overrides how `serve` opens its ledger writer (fault injection).
  WriterFactory writer_factory;
};

/// Runs `lcaas <args...>` (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Hooks& hooks = {});

/// Stops a `serve` started by run(); safe to call from any thread.
void stop_serving();

/// Line-based chunking: each chunk is the exact bytes of up to
/// `lines_per_chunk` consecutive lines, trailing newlines included.
/// `lines_per_chunk` == 0 means the whole content is one chunk.
std::vector<std::string> split_chunks(const std::string& content, std::size_t lines_per_chunk);

}  // namespace lcaas::cli
