#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "molspo/chem/molecule.hpp"
#include "molspo/chem/rings.hpp"

namespace molspo::chem {

class SmartsError : public std::runtime_error {
 public:
  SmartsError(std::string_view pattern, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Molecule plus the derived per-atom properties that SMARTS primitives
/// query. Build once and reuse across patterns.
class SmartsTarget {
 public:
  explicit SmartsTarget(const Molecule& m);

  const Molecule& molecule() const { return m_; }
  const RingInfo& rings() const { return rings_; }

 private:
  const Molecule& m_;
  RingInfo rings_;
};

struct AtomExpr;
struct BondExpr;

/// Substructure pattern in a SMARTS subset: element and aromaticity
/// primitives, #n, H, h, D, X, v, R, r, x, charges, recursive $(...), and the
/// logical operators ! & , ;. Bonds: - = # : ~ @ with the same operators;
/// an unspecified bond means single or aromatic.
class SmartsPattern {
 public:
  explicit SmartsPattern(std::string_view text);
  ~SmartsPattern();
  SmartsPattern(SmartsPattern&&) noexcept;
  SmartsPattern& operator=(SmartsPattern&&) noexcept;

  const std::string& text() const { return text_; }
  int atom_count() const;

  /// True when some embedding maps the first pattern atom onto `atom`.
  bool matches_at(const SmartsTarget& target, int atom) const;
  bool matches(const SmartsTarget& target) const;
  /// Embeddings with distinct target atom sets, each listed in pattern atom
  /// order.
  std::vector<std::vector<int>> find_all(const SmartsTarget& target) const;
  std::size_t count(const SmartsTarget& target) const {
    return find_all(target).size();
  }

  struct Graph;

 private:
  std::string text_;
  std::unique_ptr<Graph> graph_;
};

}  // namespace molspo::chem
