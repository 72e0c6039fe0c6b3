#include "molspo/chem/elements.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>
#include <stdexcept>

namespace molspo::chem {
namespace {

using R = ChargeRule;

// Sorted by atomic number. Elements not listed cannot be parsed.
constexpr std::array kElements = {
    Element{"H", 1, 1.008, 1, R::kHydrogen},
    Element{"He", 2, 4.003, 0, R::kMetal},
    Element{"Li", 3, 6.941, 1, R::kMetal},
    Element{"Be", 4, 9.012, 2, R::kMetal},
    Element{"B", 5, 10.812, 3, R::kBoronLike},
    Element{"C", 6, 12.011, 4, R::kCarbonLike},
    Element{"N", 7, 14.007, 3, R::kDonorLike},
    Element{"O", 8, 15.999, 2, R::kDonorLike},
    Element{"F", 9, 18.998, 1, R::kDonorLike},
    Element{"Ne", 10, 20.180, 0, R::kMetal},
    Element{"Na", 11, 22.990, 1, R::kMetal},
    Element{"Mg", 12, 24.305, 2, R::kMetal},
    Element{"Al", 13, 26.982, 3, R::kBoronLike},
    Element{"Si", 14, 28.086, 4, R::kCarbonLike},
    Element{"P", 15, 30.974, 5, R::kDonorLike},
    Element{"S", 16, 32.067, 6, R::kDonorLike},
    Element{"Cl", 17, 35.453, 1, R::kDonorLike},
    Element{"Ar", 18, 39.948, 0, R::kMetal},
    Element{"K", 19, 39.098, 1, R::kMetal},
    Element{"Ca", 20, 40.078, 2, R::kMetal},
    Element{"Ti", 22, 47.867, 4, R::kMetal},
    Element{"V", 23, 50.942, 5, R::kMetal},
    Element{"Cr", 24, 51.996, 6, R::kMetal},
    Element{"Mn", 25, 54.938, 7, R::kMetal},
    Element{"Fe", 26, 55.845, 6, R::kMetal},
    Element{"Co", 27, 58.933, 6, R::kMetal},
    Element{"Ni", 28, 58.693, 6, R::kMetal},
    Element{"Cu", 29, 63.546, 4, R::kMetal},
    Element{"Zn", 30, 65.390, 2, R::kMetal},
    Element{"Ga", 31, 69.723, 3, R::kBoronLike},
    Element{"Ge", 32, 72.610, 4, R::kCarbonLike},
    Element{"As", 33, 74.922, 5, R::kDonorLike},
    Element{"Se", 34, 78.960, 6, R::kDonorLike},
    Element{"Br", 35, 79.904, 1, R::kDonorLike},
    Element{"Kr", 36, 83.800, 0, R::kMetal},
    Element{"Rb", 37, 85.468, 1, R::kMetal},
    Element{"Sr", 38, 87.620, 2, R::kMetal},
    Element{"Zr", 40, 91.224, 4, R::kMetal},
    Element{"Nb", 41, 92.906, 5, R::kMetal},
    Element{"Mo", 42, 95.940, 6, R::kMetal},
    Element{"Ru", 44, 101.070, 8, R::kMetal},
    Element{"Rh", 45, 102.906, 6, R::kMetal},
    Element{"Pd", 46, 106.420, 4, R::kMetal},
    Element{"Ag", 47, 107.868, 2, R::kMetal},
    Element{"Cd", 48, 112.411, 2, R::kMetal},
    Element{"In", 49, 114.818, 3, R::kBoronLike},
    Element{"Sn", 50, 118.710, 4, R::kCarbonLike},
    Element{"Sb", 51, 121.760, 5, R::kDonorLike},
    Element{"Te", 52, 127.600, 6, R::kDonorLike},
    Element{"I", 53, 126.904, 5, R::kDonorLike},
    Element{"Xe", 54, 131.290, 0, R::kMetal},
    Element{"Cs", 55, 132.905, 1, R::kMetal},
    Element{"Ba", 56, 137.327, 2, R::kMetal},
    Element{"Gd", 64, 157.250, 3, R::kMetal},
    Element{"Ho", 67, 164.930, 3, R::kMetal},
    Element{"Hf", 72, 178.490, 4, R::kMetal},
    Element{"W", 74, 183.840, 6, R::kMetal},
    Element{"Pt", 78, 195.078, 6, R::kMetal},
    Element{"Au", 79, 196.967, 3, R::kMetal},
    Element{"Hg", 80, 200.590, 2, R::kMetal},
    Element{"Tl", 81, 204.383, 3, R::kBoronLike},
    Element{"Pb", 82, 207.200, 4, R::kCarbonLike},
    Element{"Bi", 83, 208.980, 5, R::kDonorLike},
};

constexpr int kB3[] = {3};
constexpr int kC4[] = {4};
constexpr int kN35[] = {3, 5};
constexpr int kO2[] = {2};
constexpr int kP35[] = {3, 5};
constexpr int kS246[] = {2, 4, 6};
constexpr int kHal1[] = {1};

}  // namespace

const Element* find_element(std::string_view symbol) {
  for (const Element& e : kElements) {
    if (e.symbol == symbol) {
      return &e;
    }
  }
  return nullptr;
}

const Element& element(std::uint8_t number) {
  const auto it = std::lower_bound(
      kElements.begin(), kElements.end(), number,
      [](const Element& e, std::uint8_t n) { return e.number < n; });
  if (it == kElements.end() || it->number != number) {
    throw std::out_of_range("unknown atomic number");
  }
  return *it;
}

std::span<const int> default_valences(std::uint8_t number) {
  switch (number) {
  case elem::kB:
    return kB3;
  case elem::kC:
    return kC4;
  case elem::kN:
    return kN35;
  case elem::kO:
    return kO2;
  case elem::kP:
    return kP35;
  case elem::kS:
    return kS246;
  case elem::kF:
  case elem::kCl:
  case elem::kBr:
  case elem::kI:
    return kHal1;
  default:
    return {};
  }
}

bool in_organic_subset(std::uint8_t number) {
  return !default_valences(number).empty();
}

bool can_be_aromatic(std::uint8_t number) {
  switch (number) {
  case elem::kB:
  case elem::kC:
  case elem::kN:
  case elem::kO:
  case elem::kP:
  case elem::kS:
  case 33:  // As
  case 34:  // Se
  case 52:  // Te
    return true;
  default:
    return false;
  }
}

std::optional<int> max_valence(std::uint8_t number, int charge) {
  const Element& e = element(number);
  switch (e.charge_rule) {
  case ChargeRule::kHydrogen:
    return 1 - std::abs(charge);
  case ChargeRule::kBoronLike:
    return e.max_valence - charge;
  case ChargeRule::kCarbonLike:
    return e.max_valence - std::abs(charge);
  case ChargeRule::kDonorLike:
    return e.max_valence + charge;
  case ChargeRule::kMetal:
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace molspo::chem
