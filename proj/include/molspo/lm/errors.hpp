#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace molspo::lm {

enum class LmErrorKind : std::uint8_t {
  kContextOverflow,
  kBadConfig,
  kBadCheckpoint,
  kCheckpointNotFound,
  kEmptyCorpus,
};

class LmError : public std::runtime_error {
 public:
  LmError(LmErrorKind kind, const std::string& detail);
  LmErrorKind kind() const { return kind_; }

 private:
  LmErrorKind kind_;
};

}  // namespace molspo::lm
