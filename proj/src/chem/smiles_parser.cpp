#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "molspo/chem/smiles.hpp"

namespace molspo::chem {

const char* to_string(SmilesErrorKind kind) {
  switch (kind) {
  case SmilesErrorKind::kEmptyInput:
    return "EmptyInput";
  case SmilesErrorKind::kSyntax:
    return "Syntax";
  case SmilesErrorKind::kUnbalancedParenthesis:
    return "UnbalancedParenthesis";
  case SmilesErrorKind::kUnknownElement:
    return "UnknownElement";
  case SmilesErrorKind::kUnclosedRingBond:
    return "UnclosedRingBond";
  case SmilesErrorKind::kValenceViolation:
    return "ValenceViolation";
  case SmilesErrorKind::kAromaticity:
    return "Aromaticity";
  case SmilesErrorKind::kBondConflict:
    return "BondConflict";
  }
  return "Unknown";
}

SmilesError::SmilesError(SmilesErrorKind kind, std::size_t offset)
    : std::runtime_error(std::string(to_string(kind)) + " at offset " +
                         std::to_string(offset)),
      kind_(kind),
      offset_(offset) { }

int implicit_hydrogens(std::uint8_t element, bool aromatic, int bond_order_sum) {
  const auto valences = default_valences(element);
  if (valences.empty()) {
    return 0;
  }
  if (aromatic) {
    return std::max(0, valences[0] - bond_order_sum - 1);
  }
  for (const int v : valences) {
    if (v >= bond_order_sum) {
      return v - bond_order_sum;
    }
  }
  return 0;
}

namespace {

struct BondSpec {
  std::optional<BondOrder> order;  // nullopt: implicit
  bool stereo = false;             // '/' or '\'
  std::size_t offset = 0;
};

struct PendingBond {
  int begin;
  int end;
  BondSpec spec;
};

struct RingOpening {
  int atom = -1;
  BondSpec spec;
  std::size_t offset = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) { }

  Molecule run() {
    if (text_.empty()) {
      throw SmilesError(SmilesErrorKind::kEmptyInput, 0);
    }
    while (pos_ < text_.size()) {
      step();
    }
    if (!branches_.empty()) {
      throw SmilesError(SmilesErrorKind::kUnbalancedParenthesis,
                        branches_.back().second);
    }
    for (const RingOpening& ring : rings_) {
      if (ring.atom >= 0) {
        throw SmilesError(SmilesErrorKind::kUnclosedRingBond, ring.offset);
      }
    }
    if (pending_) {
      throw SmilesError(SmilesErrorKind::kSyntax, pending_->offset);
    }
    return finish();
  }

 private:
  [[noreturn]] void fail(SmilesErrorKind kind, std::size_t at) const {
    throw SmilesError(kind, at);
  }

  void step() {
    const char c = text_[pos_];
    const auto uc = static_cast<unsigned char>(c);
    if (uc >= 0x80 || std::isspace(uc)) {
      fail(SmilesErrorKind::kSyntax, pos_);
    }
    switch (c) {
    case '(':
      if (prev_ < 0 || pending_) {
        fail(SmilesErrorKind::kSyntax, pos_);
      }
      branches_.emplace_back(prev_, pos_);
      ++pos_;
      return;
    case ')':
      if (branches_.empty()) {
        fail(SmilesErrorKind::kUnbalancedParenthesis, pos_);
      }
      if (pending_) {
        fail(SmilesErrorKind::kSyntax, pos_);
      }
      prev_ = branches_.back().first;
      branches_.pop_back();
      ++pos_;
      return;
    case '.':
      if (pending_ || prev_ < 0) {
        fail(SmilesErrorKind::kSyntax, pos_);
      }
      prev_ = -1;
      ++pos_;
      return;
    case '-':
    case '=':
    case '#':
    case ':':
    case '/':
    case '\\':
      bond_symbol(c);
      return;
    case '%':
      ring_closure();
      return;
    case '[':
      bracket_atom();
      return;
    default:
      break;
    }
    if (std::isdigit(uc)) {
      ring_closure();
      return;
    }
    organic_atom();
  }

  void bond_symbol(char c) {
    if (pending_ || prev_ < 0) {
      fail(SmilesErrorKind::kSyntax, pos_);
    }
    BondSpec spec;
    spec.offset = pos_;
    switch (c) {
    case '-':
      spec.order = BondOrder::kSingle;
      break;
    case '=':
      spec.order = BondOrder::kDouble;
      break;
    case '#':
      spec.order = BondOrder::kTriple;
      break;
    case ':':
      spec.order = BondOrder::kAromatic;
      break;
    default:
      spec.order = BondOrder::kSingle;
      spec.stereo = true;
      break;
    }
    pending_ = spec;
    ++pos_;
  }

  void ring_closure() {
    const std::size_t start = pos_;
    if (prev_ < 0) {
      fail(SmilesErrorKind::kSyntax, start);
    }
    int number;
    if (text_[pos_] == '%') {
      if (pos_ + 2 >= text_.size() ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2]))) {
        fail(SmilesErrorKind::kSyntax, start);
      }
      number = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
      pos_ += 3;
    } else {
      number = text_[pos_] - '0';
      ++pos_;
    }
    BondSpec here = pending_.value_or(BondSpec{});
    pending_.reset();
    RingOpening& ring = rings_[number];
    if (ring.atom < 0) {
      ring = RingOpening{prev_, here, start};
      return;
    }
    BondSpec merged = ring.spec;
    if (here.order) {
      if (merged.order && !(merged.stereo || here.stereo) &&
          *merged.order != *here.order) {
        fail(SmilesErrorKind::kBondConflict, start);
      }
      if (!merged.order || merged.stereo) {
        merged = here;
      }
    }
    if (ring.atom == prev_) {
      fail(SmilesErrorKind::kBondConflict, start);
    }
    bonds_.push_back({ring.atom, prev_, merged});
    ring.atom = -1;
  }

  void add_atom(Atom atom, bool bracket, std::size_t offset) {
    const int index = static_cast<int>(atoms_.size());
    atoms_.push_back(atom);
    bracket_.push_back(bracket);
    offsets_.push_back(offset);
    if (prev_ >= 0) {
      bonds_.push_back({prev_, index, pending_.value_or(BondSpec{})});
    }
    pending_.reset();
    prev_ = index;
  }

  void organic_atom() {
    const std::size_t start = pos_;
    const auto two = text_.substr(pos_, 2);
    Atom atom;
    if (two == "Cl") {
      atom.element = elem::kCl;
      pos_ += 2;
    } else if (two == "Br") {
      atom.element = elem::kBr;
      pos_ += 2;
    } else {
      const char c = text_[pos_];
      switch (c) {
      case 'B':
        atom.element = elem::kB;
        break;
      case 'C':
        atom.element = elem::kC;
        break;
      case 'N':
        atom.element = elem::kN;
        break;
      case 'O':
        atom.element = elem::kO;
        break;
      case 'P':
        atom.element = elem::kP;
        break;
      case 'S':
        atom.element = elem::kS;
        break;
      case 'F':
        atom.element = elem::kF;
        break;
      case 'I':
        atom.element = elem::kI;
        break;
      case 'b':
        atom.element = elem::kB;
        atom.aromatic = true;
        break;
      case 'c':
        atom.element = elem::kC;
        atom.aromatic = true;
        break;
      case 'n':
        atom.element = elem::kN;
        atom.aromatic = true;
        break;
      case 'o':
        atom.element = elem::kO;
        atom.aromatic = true;
        break;
      case 'p':
        atom.element = elem::kP;
        atom.aromatic = true;
        break;
      case 's':
        atom.element = elem::kS;
        atom.aromatic = true;
        break;
      default:
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '*') {
          fail(SmilesErrorKind::kUnknownElement, start);
        }
        fail(SmilesErrorKind::kSyntax, start);
      }
      ++pos_;
    }
    add_atom(atom, false, start);
  }

  int read_int(int fallback) {
    if (pos_ >= text_.size() ||
        !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      return fallback;
    }
    int value = 0;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + (text_[pos_] - '0');
      if (value > 1000) {
        fail(SmilesErrorKind::kSyntax, pos_);
      }
      ++pos_;
    }
    return value;
  }

  bool peek(char c) const { return pos_ < text_.size() && text_[pos_] == c; }

  void bracket_atom() {
    const std::size_t start = pos_;
    ++pos_;  // '['
    read_int(0);  // isotope, discarded
    if (pos_ >= text_.size()) {
      fail(SmilesErrorKind::kSyntax, start);
    }
    Atom atom;
    const std::size_t sym_start = pos_;
    const char c0 = text_[pos_];
    if (std::islower(static_cast<unsigned char>(c0))) {
      // aromatic: b c n o p s se as te
      for (const std::string_view arom : {"se", "as", "te"}) {
        if (text_.substr(pos_, 2) == arom) {
          std::string sym(arom);
          sym[0] = static_cast<char>(std::toupper(sym[0]));
          atom.element = find_element(sym)->number;
          atom.aromatic = true;
          pos_ += 2;
          break;
        }
      }
      if (!atom.aromatic) {
        const std::string sym(1, static_cast<char>(std::toupper(c0)));
        const Element* e = find_element(sym);
        if (e == nullptr || !can_be_aromatic(e->number)) {
          fail(SmilesErrorKind::kUnknownElement, sym_start);
        }
        atom.element = e->number;
        atom.aromatic = true;
        ++pos_;
      }
    } else if (std::isupper(static_cast<unsigned char>(c0))) {
      const Element* e = nullptr;
      if (pos_ + 1 < text_.size() &&
          std::islower(static_cast<unsigned char>(text_[pos_ + 1]))) {
        e = find_element(text_.substr(pos_, 2));
        if (e != nullptr) {
          pos_ += 2;
        }
      }
      if (e == nullptr) {
        e = find_element(text_.substr(pos_, 1));
        if (e == nullptr) {
          fail(SmilesErrorKind::kUnknownElement, sym_start);
        }
        ++pos_;
      }
      atom.element = e->number;
    } else {
      fail(c0 == '*' ? SmilesErrorKind::kUnknownElement : SmilesErrorKind::kSyntax,
           sym_start);
    }
    // chirality, discarded
    while (peek('@')) {
      ++pos_;
    }
    for (const std::string_view cls : {"TH", "AL", "SP", "TB", "OH"}) {
      if (text_.substr(pos_, 2) == cls && text_[pos_ - 1] == '@') {
        pos_ += 2;
        read_int(0);
      }
    }
    if (peek('H')) {
      ++pos_;
      atom.hydrogens = static_cast<std::uint8_t>(read_int(1));
    }
    int charge = 0;
    if (peek('+') || peek('-')) {
      const char sign = text_[pos_];
      const int unit = sign == '+' ? 1 : -1;
      ++pos_;
      if (pos_ < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        charge = unit * read_int(1);
      } else {
        charge = unit;
        while (peek(sign)) {
          charge += unit;
          ++pos_;
        }
      }
    }
    if (charge < -8 || charge > 8) {
      fail(SmilesErrorKind::kSyntax, start);
    }
    atom.charge = static_cast<std::int8_t>(charge);
    if (peek(':')) {
      ++pos_;
      read_int(0);  // atom class, discarded
    }
    if (!peek(']')) {
      fail(SmilesErrorKind::kSyntax, pos_ < text_.size() ? pos_ : start);
    }
    ++pos_;
    add_atom(atom, true, start);
  }

  Molecule finish() {
    std::vector<Bond> bonds;
    bonds.reserve(bonds_.size());
    for (const PendingBond& pb : bonds_) {
      BondOrder order = BondOrder::kSingle;
      if (pb.spec.order) {
        order = *pb.spec.order;
      } else if (atoms_[pb.begin].aromatic && atoms_[pb.end].aromatic) {
        order = BondOrder::kAromatic;
      }
      bonds.push_back({pb.begin, pb.end, order});
    }
    // Implicit bonds between aromatic atoms outside rings (biaryl links)
    // are single.
    const auto in_ring =
        Molecule::ring_bond_flags(static_cast<int>(atoms_.size()), bonds);
    for (std::size_t i = 0; i < bonds.size(); ++i) {
      if (!bonds_[i].spec.order && bonds[i].order == BondOrder::kAromatic &&
          !in_ring[i]) {
        bonds[i].order = BondOrder::kSingle;
      }
    }
    std::vector<int> order_sum(atoms_.size(), 0);
    for (const Bond& b : bonds) {
      order_sum[b.begin] += bond_valence(b.order);
      order_sum[b.end] += bond_valence(b.order);
    }
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (!bracket_[i]) {
        atoms_[i].hydrogens = static_cast<std::uint8_t>(implicit_hydrogens(
            atoms_[i].element, atoms_[i].aromatic, order_sum[i]));
      }
    }
    if (const auto bad = Molecule::check(atoms_, bonds)) {
      const std::size_t at = offsets_[bad->atom];
      switch (bad->kind) {
      case GraphErrorKind::kValenceViolation:
        fail(SmilesErrorKind::kValenceViolation, at);
      case GraphErrorKind::kAromaticBondMismatch:
      case GraphErrorKind::kNonRingAromatic:
        fail(SmilesErrorKind::kAromaticity, at);
      default:
        fail(SmilesErrorKind::kBondConflict, at);
      }
    }
    return Molecule(std::move(atoms_), std::move(bonds));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int prev_ = -1;
  std::optional<BondSpec> pending_;
  std::vector<std::pair<int, std::size_t>> branches_;
  std::vector<Atom> atoms_;
  std::vector<bool> bracket_;
  std::vector<std::size_t> offsets_;
  std::vector<PendingBond> bonds_;

  std::array<RingOpening, 100> rings_{};
};

}  // namespace

Molecule parse_smiles(std::string_view text) { return Parser(text).run(); }

bool is_valid(std::string_view text) {
  try {
    parse_smiles(text);
    return true;
  } catch (const SmilesError&) {
    return false;
  }
}

}  // namespace molspo::chem
