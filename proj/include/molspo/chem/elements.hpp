#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace molspo::chem {

/// How formal charge shifts the maximum valence of an element.
enum class ChargeRule : std::uint8_t {
  kHydrogen,     // max = 1 - |q|
  kBoronLike,    // group 13: max = v - q
  kCarbonLike,   // group 14: max = v - |q|
  kDonorLike,    // groups 15-17: max = v + q
  kMetal,        // not checked
};

struct Element {
  std::string_view symbol;
  std::uint8_t number;
  double mass;
  int max_valence;  // neutral atom
  ChargeRule charge_rule;
};

/// Lookup by exact (case-sensitive) symbol, e.g. "Cl".
const Element* find_element(std::string_view symbol);
const Element& element(std::uint8_t number);

/// Normal valences for organic-subset atoms written without brackets;
/// empty for anything outside B, C, N, O, P, S, F, Cl, Br, I.
std::span<const int> default_valences(std::uint8_t number);

bool in_organic_subset(std::uint8_t number);

/// Elements allowed to carry aromatic (lowercase) notation.
bool can_be_aromatic(std::uint8_t number);

/// Largest valence allowed for the element at the given formal charge, or
/// nullopt when the element is not valence-checked.
std::optional<int> max_valence(std::uint8_t number, int charge);

namespace elem {
inline constexpr std::uint8_t kH = 1;
inline constexpr std::uint8_t kB = 5;
inline constexpr std::uint8_t kC = 6;
inline constexpr std::uint8_t kN = 7;
inline constexpr std::uint8_t kO = 8;
inline constexpr std::uint8_t kF = 9;
inline constexpr std::uint8_t kP = 15;
inline constexpr std::uint8_t kS = 16;
inline constexpr std::uint8_t kCl = 17;
inline constexpr std::uint8_t kBr = 35;
inline constexpr std::uint8_t kI = 53;
}  // namespace elem

}  // namespace molspo::chem
