#include "molspo/harness/errors.hpp"

namespace molspo::harness {

const char* to_string(HarnessErrorKind kind) {
  switch (kind) {
    case HarnessErrorKind::kUsage:
      return "usage";
    case HarnessErrorKind::kMissingArtifact:
      return "missing_artifact";
    case HarnessErrorKind::kData:
      return "data";
  }
  return "unknown";
}

int exit_code(HarnessErrorKind kind) {
  switch (kind) {
    case HarnessErrorKind::kUsage:
      return 1;
    case HarnessErrorKind::kMissingArtifact:
      return 2;
    case HarnessErrorKind::kData:
      return 3;
  }
  return 1;
}

HarnessError::HarnessError(HarnessErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

}  // namespace molspo::harness

#include "molspo/chem/molecule.hpp"
#include "molspo/chem/smiles.hpp"
#include "molspo/corpus/corpus.hpp"
#include "molspo/critics/errors.hpp"
#include "molspo/decode/decode.hpp"
#include "molspo/lm/errors.hpp"
#include "molspo/tokenizer/bpe.hpp"

namespace molspo::harness {

ErrorInfo classify(const std::exception& e) {
  const std::string msg = e.what();
  if (const auto* h = dynamic_cast<const HarnessError*>(&e)) {
    return {exit_code(h->kind()), to_string(h->kind()), msg};
  }
  if (const auto* l = dynamic_cast<const lm::LmError*>(&e)) {
    if (l->kind() == lm::LmErrorKind::kCheckpointNotFound) {
      return {2, "missing_artifact", msg};
    }
    if (l->kind() == lm::LmErrorKind::kBadConfig) {
      return {1, "usage", msg};
    }
    return {3, "data", msg};
  }
  if (const auto* c = dynamic_cast<const corpus::CorpusError*>(&e)) {
    if (c->kind() == corpus::CorpusErrorKind::kBadFile) {
      return {2, "missing_artifact", msg};
    }
    return {3, "data", msg};
  }
  if (const auto* c = dynamic_cast<const critics::CriticError*>(&e)) {
    if (c->kind() == critics::CriticErrorKind::kBadSpec) {
      return {1, "usage", msg};
    }
    return {3, "data", msg};
  }
  if (dynamic_cast<const tokenizer::TokenizerError*>(&e) ||
      dynamic_cast<const chem::SmilesError*>(&e) || dynamic_cast<const chem::MoleculeError*>(&e)) {
    return {3, "data", msg};
  }
  if (dynamic_cast<const std::invalid_argument*>(&e)) {
    return {1, "usage", msg};
  }
  return {3, "data", msg};
}

}  // namespace molspo::harness
