#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "molspo/chem/molecule.hpp"

namespace molspo::fp {

enum class FpErrorKind : std::uint8_t {
  kEmptyMolecule,
  kWidthMismatch,
  kBadWidth,
  kBadRadius,
  kBadHex,
};

class FpError : public std::runtime_error {
 public:
  explicit FpError(FpErrorKind kind);
  FpErrorKind kind() const { return kind_; }

 private:
  FpErrorKind kind_;
};

/// Fixed-width bit set.
class Fingerprint {
 public:
  /// nbits must be a power of two, at least 64.
  explicit Fingerprint(int nbits = 1024);

  int nbits() const { return nbits_; }
  void set(int bit) { words_[bit / 64] |= std::uint64_t{1} << (bit % 64); }
  bool test(int bit) const { return (words_[bit / 64] >> (bit % 64)) & 1U; }
  int popcount() const;
  std::vector<int> on_bits() const;
  const std::vector<std::uint64_t>& words() const { return words_; }

  /// Lowercase hex, most significant nibble of bit 0's word last; round
  /// trips through from_hex.
  std::string to_hex() const;
  static Fingerprint from_hex(std::string_view hex);

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;

 private:
  int nbits_;
  std::vector<std::uint64_t> words_;
};

inline constexpr int kDefaultRadius = 2;
inline constexpr int kDefaultBits = 1024;

std::uint64_t fnv1a64(std::string_view bytes);

/// One circular atom environment kept by the Morgan enumeration.
struct Environment {
  int atom;
  int radius;
  std::string code;  // bytes hashed to produce `hash`
  std::uint64_t hash;
};

/// Environments that contribute bits: every radius-0 atom environment, then
/// for each radius the environments whose bond set grew and was not already
/// covered (ties between atoms with equal bond sets keep the smaller hash).
std::vector<Environment> morgan_environments(const chem::Molecule& m, int radius);

/// Throws FpError(kEmptyMolecule) for a molecule without atoms.
Fingerprint morgan_fingerprint(const chem::Molecule& m,
                               int radius = kDefaultRadius,
                               int nbits = kDefaultBits);

/// |a & b| / |a | b|, 1.0 when both are empty.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

}  // namespace molspo::fp
