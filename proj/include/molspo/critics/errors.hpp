#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace molspo::critics {

enum class CriticErrorKind : std::uint8_t {
  kUntypedAtom,
  kTableMissing,
  kEmptyCorpus,
  kBadTable,
  kSurrogateMissing,
  kTokenizationFailure,
  kInsufficientData,
  kBadSpec,
};

const char* to_string(CriticErrorKind kind);

class CriticError : public std::runtime_error {
 public:
  CriticError(CriticErrorKind kind, const std::string& detail);
  CriticErrorKind kind() const { return kind_; }

 private:
  CriticErrorKind kind_;
};

}  // namespace molspo::critics
