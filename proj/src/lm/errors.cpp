#include "molspo/lm/errors.hpp"

namespace molspo::lm {

namespace {

const char* describe(LmErrorKind kind) {
  switch (kind) {
  case LmErrorKind::kContextOverflow:
    return "ContextOverflow";
  case LmErrorKind::kBadConfig:
    return "BadConfig";
  case LmErrorKind::kBadCheckpoint:
    return "BadCheckpoint";
  case LmErrorKind::kCheckpointNotFound:
    return "CheckpointNotFound";
  case LmErrorKind::kEmptyCorpus:
    return "EmptyCorpus";
  }
  return "Unknown";
}

}  // namespace

LmError::LmError(LmErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(describe(kind)) + ": " + detail), kind_(kind) { }

}  // namespace molspo::lm
