#include "molspo/critics/errors.hpp"

namespace molspo::critics {

const char* to_string(CriticErrorKind kind) {
  switch (kind) {
  case CriticErrorKind::kUntypedAtom:
    return "UntypedAtom";
  case CriticErrorKind::kTableMissing:
    return "TableMissing";
  case CriticErrorKind::kEmptyCorpus:
    return "EmptyCorpus";
  case CriticErrorKind::kBadTable:
    return "BadTable";
  case CriticErrorKind::kSurrogateMissing:
    return "SurrogateMissing";
  case CriticErrorKind::kTokenizationFailure:
    return "TokenizationFailure";
  case CriticErrorKind::kInsufficientData:
    return "InsufficientData";
  case CriticErrorKind::kBadSpec:
    return "BadSpec";
  }
  return "Unknown";
}

CriticError::CriticError(CriticErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
      kind_(kind) { }

}  // namespace molspo::critics
