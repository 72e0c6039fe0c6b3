#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "molspo/chem/molecule.hpp"

namespace molspo::chem {

enum class SmilesErrorKind : std::uint8_t {
  kEmptyInput,
  kSyntax,
  kUnbalancedParenthesis,
  kUnknownElement,
  kUnclosedRingBond,
  kValenceViolation,
  kAromaticity,
  kBondConflict,
};

const char* to_string(SmilesErrorKind kind);

class SmilesError : public std::runtime_error {
 public:
  SmilesError(SmilesErrorKind kind, std::size_t offset);
  SmilesErrorKind kind() const { return kind_; }
  /// Byte offset into the input where the problem was detected.
  std::size_t offset() const { return offset_; }

 private:
  SmilesErrorKind kind_;
  std::size_t offset_;
};

/// Parses the organic subset plus bracket atoms. Stereo marks, isotopes and
/// atom classes are accepted and discarded. Throws SmilesError.
Molecule parse_smiles(std::string_view text);

/// Canonical SMILES: the output depends only on the molecular graph.
std::string write_smiles(const Molecule& m);

/// SMILES for a caller-supplied atom ranking (lower rank is written first);
/// ranks must be a permutation of 0..n-1.
std::string write_smiles(const Molecule& m, const std::vector<int>& ranks);

/// Atom ranks used by the canonical writer. Symmetry ties are broken by
/// searching over individualizations; the search is capped and falls back to
/// a greedy choice on very symmetric graphs.
std::vector<int> canonical_ranks(const Molecule& m);

/// Graph-invariant equivalence classes after iterative refinement, densely
/// numbered so that smaller invariants get smaller class ids.
std::vector<int> refine_classes(const Molecule& m, std::vector<int> classes);

/// parse_smiles then write_smiles. Throws SmilesError.
std::string canonical_smiles(std::string_view text);

/// True iff parse_smiles succeeds (which implies all graph invariants hold).
bool is_valid(std::string_view text);

/// Hydrogens implied for an unbracketed organic-subset atom.
int implicit_hydrogens(std::uint8_t element, bool aromatic, int bond_order_sum);

}  // namespace molspo::chem
