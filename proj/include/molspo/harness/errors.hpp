#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace molspo::harness {

/// Maps onto the CLI exit codes: usage 1, missing artifact 2, data 3.
enum class HarnessErrorKind : std::uint8_t {
  kUsage,
  kMissingArtifact,
  kData,
};

const char* to_string(HarnessErrorKind kind);
int exit_code(HarnessErrorKind kind);

class HarnessError : public std::runtime_error {
 public:
  HarnessError(HarnessErrorKind kind, const std::string& message);
  HarnessErrorKind kind() const { return kind_; }

 private:
  HarnessErrorKind kind_;
};

}  // namespace molspo::harness

namespace molspo::harness {

struct ErrorInfo {
  int exit_code = 1;
  std::string kind;
  std::string message;
};

/// Classifies any library exception for the CLI: missing checkpoints and
/// inputs map to 2, malformed data to 3, bad arguments to 1.
ErrorInfo classify(const std::exception& e);

}  // namespace molspo::harness
