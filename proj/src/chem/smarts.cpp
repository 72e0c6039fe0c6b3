#include "molspo/chem/smarts.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>

namespace molspo::chem {

SmartsError::SmartsError(std::string_view pattern, std::size_t offset)
    : std::runtime_error("bad SMARTS '" + std::string(pattern) + "' at offset " +
                         std::to_string(offset)),
      offset_(offset) { }

SmartsTarget::SmartsTarget(const Molecule& m) : m_(m), rings_(m) { }

enum class AtomOp {
  kTrue,
  kAromatic,
  kAliphatic,
  kNumber,            // any aromaticity
  kAliphaticElement,
  kAromaticElement,
  kTotalH,
  kImplicitH,
  kDegree,
  kConnectivity,
  kValence,
  kInRing,
  kRingCount,
  kRingSize,
  kRingBonds,
  kCharge,
  kRecursive,
  kNot,
  kAnd,
  kOr,
};

struct AtomExpr {
  AtomOp op = AtomOp::kTrue;
  int value = 0;
  std::vector<AtomExpr> args;
  std::shared_ptr<const SmartsPattern> sub;
};

enum class BondOp {
  kDefault,  // single or aromatic
  kAny,
  kSingle,
  kDouble,
  kTriple,
  kAromatic,
  kRing,
  kNot,
  kAnd,
  kOr,
};

struct BondExpr {
  BondOp op = BondOp::kDefault;
  std::vector<BondExpr> args;
};

struct SmartsPattern::Graph {
  struct PatternBond {
    int begin;
    int end;
    BondExpr expr;
  };
  struct Step {
    int atom;
    int anchor;       // earlier pattern atom to extend from, -1 for a root
    int anchor_bond;  // pattern bond joining atom and anchor
    std::vector<int> back_bonds;  // bonds to earlier atoms other than anchor
  };
  std::vector<AtomExpr> atoms;
  std::vector<PatternBond> bonds;
  std::vector<Step> steps;

  void plan();
};

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }

class Parser {
 public:
  Parser(std::string_view text, SmartsPattern::Graph& graph)
      : text_(text), g_(graph) { }

  void run() {
    if (text_.empty()) {
      fail();
    }
    int prev = -1;
    std::vector<int> branches;
    std::vector<std::pair<int, BondExpr>> rings(100, {-1, BondExpr{}});
    std::optional<BondExpr> pending;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(') {
        if (prev < 0) {
          fail();
        }
        branches.push_back(prev);
        ++pos_;
      } else if (c == ')') {
        if (branches.empty() || pending) {
          fail();
        }
        prev = branches.back();
        branches.pop_back();
        ++pos_;
      } else if (c == '.') {
        prev = -1;
        ++pos_;
      } else if (is_bond_char(c)) {
        if (prev < 0 || pending) {
          fail();
        }
        pending = parse_bond_low();
      } else if (is_digit(c) || c == '%') {
        if (prev < 0) {
          fail();
        }
        int number = c - '0';
        if (c == '%') {
          if (pos_ + 2 >= text_.size() || !is_digit(text_[pos_ + 1]) ||
              !is_digit(text_[pos_ + 2])) {
            fail();
          }
          number = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
          pos_ += 2;
        }
        ++pos_;
        auto& slot = rings[number];
        if (slot.first < 0) {
          slot = {prev, pending.value_or(BondExpr{})};
        } else {
          BondExpr expr = pending ? *pending : slot.second;
          g_.bonds.push_back({slot.first, prev, std::move(expr)});
          slot.first = -1;
        }
        pending.reset();
      } else {
        const int atom = static_cast<int>(g_.atoms.size());
        g_.atoms.push_back(c == '[' ? parse_bracket() : parse_bare());
        if (prev >= 0) {
          g_.bonds.push_back({prev, atom, pending.value_or(BondExpr{})});
        }
        pending.reset();
        prev = atom;
      }
    }
    if (!branches.empty() || pending || g_.atoms.empty()) {
      fail();
    }
    for (const auto& slot : rings) {
      if (slot.first >= 0) {
        fail();
      }
    }
  }

 private:
  [[noreturn]] void fail() const { throw SmartsError(text_, pos_); }

  static bool is_bond_char(char c) {
    return std::string_view("-=#:~@!/\\").find(c) != std::string_view::npos;
  }

  bool at(char c) const { return pos_ < text_.size() && text_[pos_] == c; }

  int read_int(int fallback) {
    if (pos_ >= text_.size() || !is_digit(text_[pos_])) {
      return fallback;
    }
    int v = 0;
    while (pos_ < text_.size() && is_digit(text_[pos_])) {
      v = v * 10 + (text_[pos_++] - '0');
    }
    return v;
  }

  // --- bonds -------------------------------------------------------------

  BondExpr parse_bond_low() {
    BondExpr first = parse_bond_or();
    if (!at(';')) {
      return first;
    }
    BondExpr node{BondOp::kAnd, {std::move(first)}};
    while (at(';')) {
      ++pos_;
      node.args.push_back(parse_bond_or());
    }
    return node;
  }

  BondExpr parse_bond_or() {
    BondExpr first = parse_bond_and();
    if (!at(',')) {
      return first;
    }
    BondExpr node{BondOp::kOr, {std::move(first)}};
    while (at(',')) {
      ++pos_;
      node.args.push_back(parse_bond_and());
    }
    return node;
  }

  BondExpr parse_bond_and() {
    BondExpr node{BondOp::kAnd, {parse_bond_unary()}};
    while (pos_ < text_.size() && (at('&') || is_bond_char(text_[pos_]))) {
      if (at('&')) {
        ++pos_;
      }
      node.args.push_back(parse_bond_unary());
    }
    return node.args.size() == 1 ? std::move(node.args[0]) : node;
  }

  BondExpr parse_bond_unary() {
    if (at('!')) {
      ++pos_;
      return BondExpr{BondOp::kNot, {parse_bond_unary()}};
    }
    if (pos_ >= text_.size()) {
      fail();
    }
    const char c = text_[pos_++];
    switch (c) {
    case '-':
    case '/':
    case '\\':
      return {BondOp::kSingle, {}};
    case '=':
      return {BondOp::kDouble, {}};
    case '#':
      return {BondOp::kTriple, {}};
    case ':':
      return {BondOp::kAromatic, {}};
    case '~':
      return {BondOp::kAny, {}};
    case '@':
      return {BondOp::kRing, {}};
    default:
      --pos_;
      fail();
    }
  }

  // --- atoms -------------------------------------------------------------

  static AtomExpr element_expr(std::uint8_t number, bool aromatic) {
    return {aromatic ? AtomOp::kAromaticElement : AtomOp::kAliphaticElement,
            number, {}, nullptr};
  }

  AtomExpr parse_bare() {
    const auto two = text_.substr(pos_, 2);
    if (two == "Cl" || two == "Br") {
      pos_ += 2;
      return element_expr(two == "Cl" ? elem::kCl : elem::kBr, false);
    }
    const char c = text_[pos_++];
    switch (c) {
    case '*':
      return {};
    case 'a':
      return {AtomOp::kAromatic, 0, {}, nullptr};
    case 'A':
      return {AtomOp::kAliphatic, 0, {}, nullptr};
    default:
      break;
    }
    const std::string upper(1, static_cast<char>(std::toupper(c)));
    const Element* e = find_element(upper);
    if (e == nullptr || !in_organic_subset(e->number) ||
        (is_lower(c) && !can_be_aromatic(e->number))) {
      --pos_;
      fail();
    }
    return element_expr(e->number, is_lower(c));
  }

  AtomExpr parse_bracket() {
    ++pos_;  // '['
    read_int(0);  // isotope, ignored
    AtomExpr expr = parse_atom_low();
    if (!at(']')) {
      fail();
    }
    ++pos_;
    return expr;
  }

  AtomExpr parse_atom_low() {
    AtomExpr first = parse_atom_or();
    if (!at(';')) {
      return first;
    }
    AtomExpr node{AtomOp::kAnd, 0, {std::move(first)}, nullptr};
    while (at(';')) {
      ++pos_;
      node.args.push_back(parse_atom_or());
    }
    return node;
  }

  AtomExpr parse_atom_or() {
    AtomExpr first = parse_atom_and();
    if (!at(',')) {
      return first;
    }
    AtomExpr node{AtomOp::kOr, 0, {std::move(first)}, nullptr};
    while (at(',')) {
      ++pos_;
      node.args.push_back(parse_atom_and());
    }
    return node;
  }

  AtomExpr parse_atom_and() {
    AtomExpr node{AtomOp::kAnd, 0, {parse_atom_unary()}, nullptr};
    while (pos_ < text_.size() && !at(']') && !at(';') && !at(',')) {
      if (at('&')) {
        ++pos_;
      }
      node.args.push_back(parse_atom_unary());
    }
    return node.args.size() == 1 ? std::move(node.args[0]) : node;
  }

  AtomExpr parse_atom_unary() {
    if (at('!')) {
      ++pos_;
      return {AtomOp::kNot, 0, {parse_atom_unary()}, nullptr};
    }
    return parse_primitive();
  }

  const Element* two_letter_element() const {
    if (pos_ + 1 < text_.size() && is_lower(text_[pos_ + 1])) {
      return find_element(text_.substr(pos_, 2));
    }
    return nullptr;
  }

  AtomExpr parse_primitive() {
    if (pos_ >= text_.size()) {
      fail();
    }
    const char c = text_[pos_];
    if (std::isupper(static_cast<unsigned char>(c))) {
      if (const Element* e = two_letter_element()) {
        pos_ += 2;
        return element_expr(e->number, false);
      }
      ++pos_;
      switch (c) {
      case 'A':
        return {AtomOp::kAliphatic, 0, {}, nullptr};
      case 'H':
        return {AtomOp::kTotalH, read_int(1), {}, nullptr};
      case 'D':
        return {AtomOp::kDegree, read_int(1), {}, nullptr};
      case 'X':
        return {AtomOp::kConnectivity, read_int(1), {}, nullptr};
      case 'R':
        if (pos_ < text_.size() && is_digit(text_[pos_])) {
          return {AtomOp::kRingCount, read_int(0), {}, nullptr};
        }
        return {AtomOp::kInRing, 0, {}, nullptr};
      default:
        break;
      }
      const Element* e = find_element(std::string(1, c));
      if (e == nullptr) {
        --pos_;
        fail();
      }
      return element_expr(e->number, false);
    }
    if (is_lower(c)) {
      for (const std::string_view sym : {"se", "as", "te"}) {
        if (text_.substr(pos_, 2) == sym) {
          pos_ += 2;
          std::string upper(sym);
          upper[0] = static_cast<char>(std::toupper(upper[0]));
          return element_expr(find_element(upper)->number, true);
        }
      }
      ++pos_;
      switch (c) {
      case 'a':
        return {AtomOp::kAromatic, 0, {}, nullptr};
      case 'h':
        return {AtomOp::kImplicitH, read_int(1), {}, nullptr};
      case 'v':
        return {AtomOp::kValence, read_int(1), {}, nullptr};
      case 'x':
        return {AtomOp::kRingBonds, read_int(1), {}, nullptr};
      case 'r':
        if (pos_ < text_.size() && is_digit(text_[pos_])) {
          return {AtomOp::kRingSize, read_int(0), {}, nullptr};
        }
        return {AtomOp::kInRing, 0, {}, nullptr};
      default:
        break;
      }
      const Element* e =
          find_element(std::string(1, static_cast<char>(std::toupper(c))));
      if (e == nullptr || !can_be_aromatic(e->number)) {
        --pos_;
        fail();
      }
      return element_expr(e->number, true);
    }
    switch (c) {
    case '*':
      ++pos_;
      return {};
    case '#': {
      ++pos_;
      if (pos_ >= text_.size() || !is_digit(text_[pos_])) {
        fail();
      }
      return {AtomOp::kNumber, read_int(0), {}, nullptr};
    }
    case '+':
    case '-': {
      const int unit = c == '+' ? 1 : -1;
      ++pos_;
      if (pos_ < text_.size() && is_digit(text_[pos_])) {
        return {AtomOp::kCharge, unit * read_int(0), {}, nullptr};
      }
      int charge = unit;
      while (at(c)) {
        charge += unit;
        ++pos_;
      }
      return {AtomOp::kCharge, charge, {}, nullptr};
    }
    case '@':
      while (at('@')) {
        ++pos_;
      }
      return {};
    case '$': {
      ++pos_;
      if (!at('(')) {
        fail();
      }
      const std::size_t start = ++pos_;
      int depth = 1;
      while (pos_ < text_.size() && depth > 0) {
        depth += text_[pos_] == '(';
        depth -= text_[pos_] == ')';
        ++pos_;
      }
      if (depth != 0) {
        fail();
      }
      auto sub = std::make_shared<const SmartsPattern>(
          text_.substr(start, pos_ - 1 - start));
      return {AtomOp::kRecursive, 0, {}, std::move(sub)};
    }
    default:
      fail();
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  SmartsPattern::Graph& g_;
};

bool eval_atom(const AtomExpr& e, const SmartsTarget& t, int i) {
  const Molecule& m = t.molecule();
  const Atom& a = m.atom(i);
  switch (e.op) {
  case AtomOp::kTrue:
    return true;
  case AtomOp::kAromatic:
    return a.aromatic;
  case AtomOp::kAliphatic:
    return !a.aromatic;
  case AtomOp::kNumber:
    return a.element == e.value;
  case AtomOp::kAliphaticElement:
    return a.element == e.value && !a.aromatic;
  case AtomOp::kAromaticElement:
    return a.element == e.value && a.aromatic;
  case AtomOp::kTotalH:
    return m.total_hydrogens(i) == e.value;
  case AtomOp::kImplicitH:
    return a.hydrogens == e.value;
  case AtomOp::kDegree:
    return m.degree(i) == e.value;
  case AtomOp::kConnectivity:
    return m.degree(i) + a.hydrogens == e.value;
  case AtomOp::kValence:
    return m.valence(i) == e.value;
  case AtomOp::kInRing:
    return m.atom_in_ring(i);
  case AtomOp::kRingCount:
    return t.rings().atom_ring_count[i] == e.value;
  case AtomOp::kRingSize:
    return t.rings().atom_smallest_ring[i] == e.value;
  case AtomOp::kRingBonds:
    return t.rings().atom_ring_bonds[i] == e.value;
  case AtomOp::kCharge:
    return a.charge == e.value;
  case AtomOp::kRecursive:
    return e.sub->matches_at(t, i);
  case AtomOp::kNot:
    return !eval_atom(e.args[0], t, i);
  case AtomOp::kAnd:
    return std::all_of(e.args.begin(), e.args.end(),
                       [&](const AtomExpr& x) { return eval_atom(x, t, i); });
  case AtomOp::kOr:
    return std::any_of(e.args.begin(), e.args.end(),
                       [&](const AtomExpr& x) { return eval_atom(x, t, i); });
  }
  return false;
}

bool eval_bond(const BondExpr& e, const Molecule& m, int b) {
  const BondOrder order = m.bond(b).order;
  switch (e.op) {
  case BondOp::kDefault:
    return order == BondOrder::kSingle || order == BondOrder::kAromatic;
  case BondOp::kAny:
    return true;
  case BondOp::kSingle:
    return order == BondOrder::kSingle;
  case BondOp::kDouble:
    return order == BondOrder::kDouble;
  case BondOp::kTriple:
    return order == BondOrder::kTriple;
  case BondOp::kAromatic:
    return order == BondOrder::kAromatic;
  case BondOp::kRing:
    return m.bond_in_ring(b);
  case BondOp::kNot:
    return !eval_bond(e.args[0], m, b);
  case BondOp::kAnd:
    return std::all_of(e.args.begin(), e.args.end(),
                       [&](const BondExpr& x) { return eval_bond(x, m, b); });
  case BondOp::kOr:
    return std::any_of(e.args.begin(), e.args.end(),
                       [&](const BondExpr& x) { return eval_bond(x, m, b); });
  }
  return false;
}

// Backtracking embedding search over the planned step order. `visit`
// returns true to stop the search.
class Embedder {
 public:
  Embedder(const SmartsPattern::Graph& g, const SmartsTarget& t)
      : g_(g), t_(t), map_(g.atoms.size(), -1),
        used_(t.molecule().atom_count(), false) { }

  bool run(int root_atom, const std::function<bool(const std::vector<int>&)>& visit) {
    visit_ = &visit;
    root_ = root_atom;
    return extend(0);
  }

 private:
  bool try_atom(std::size_t k, int target) {
    const auto& step = g_.steps[k];
    if (used_[target] || !eval_atom(g_.atoms[step.atom], t_, target)) {
      return false;
    }
    const Molecule& m = t_.molecule();
    for (const int pb : step.back_bonds) {
      const auto& bond = g_.bonds[pb];
      const int other = map_[bond.begin == step.atom ? bond.end : bond.begin];
      const auto tb = m.bond_between(target, other);
      if (!tb || !eval_bond(bond.expr, m, *tb)) {
        return false;
      }
    }
    map_[step.atom] = target;
    used_[target] = true;
    const bool stop = extend(k + 1);
    map_[step.atom] = -1;
    used_[target] = false;
    return stop;
  }

  bool extend(std::size_t k) {
    if (k == g_.steps.size()) {
      return (*visit_)(map_);
    }
    const auto& step = g_.steps[k];
    const Molecule& m = t_.molecule();
    if (step.anchor >= 0) {
      const BondExpr& expr = g_.bonds[step.anchor_bond].expr;
      for (const Neighbor& nb : m.neighbors(map_[step.anchor])) {
        if (eval_bond(expr, m, nb.bond) && try_atom(k, nb.atom)) {
          return true;
        }
      }
      return false;
    }
    if (k == 0 && root_ >= 0) {
      return try_atom(k, root_);
    }
    for (int a = 0; a < m.atom_count(); ++a) {
      if (try_atom(k, a)) {
        return true;
      }
    }
    return false;
  }

  const SmartsPattern::Graph& g_;
  const SmartsTarget& t_;
  std::vector<int> map_;
  std::vector<bool> used_;
  const std::function<bool(const std::vector<int>&)>* visit_ = nullptr;
  int root_ = -1;
};

}  // namespace

void SmartsPattern::Graph::plan() {
  const int n = static_cast<int>(atoms.size());
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (atom, bond)
  for (int b = 0; b < static_cast<int>(bonds.size()); ++b) {
    adj[bonds[b].begin].emplace_back(bonds[b].end, b);
    adj[bonds[b].end].emplace_back(bonds[b].begin, b);
  }
  std::vector<int> position(n, -1);
  for (int root = 0; root < n; ++root) {
    if (position[root] >= 0) {
      continue;
    }
    const std::size_t first = steps.size();
    position[root] = static_cast<int>(steps.size());
    steps.push_back({root, -1, -1, {}});
    for (std::size_t k = first; k < steps.size(); ++k) {
      const int a = steps[k].atom;
      for (const auto& [nbr, bond] : adj[a]) {
        if (position[nbr] < 0) {
          position[nbr] = static_cast<int>(steps.size());
          steps.push_back({nbr, a, bond, {}});
        }
      }
    }
  }
  for (Step& step : steps) {
    for (const auto& [nbr, bond] : adj[step.atom]) {
      if (bond != step.anchor_bond && position[nbr] < position[step.atom]) {
        step.back_bonds.push_back(bond);
      }
    }
  }
}

SmartsPattern::SmartsPattern(std::string_view text)
    : text_(text), graph_(std::make_unique<Graph>()) {
  Parser(text_, *graph_).run();
  graph_->plan();
}

SmartsPattern::~SmartsPattern() = default;
SmartsPattern::SmartsPattern(SmartsPattern&&) noexcept = default;
SmartsPattern& SmartsPattern::operator=(SmartsPattern&&) noexcept = default;

int SmartsPattern::atom_count() const {
  return static_cast<int>(graph_->atoms.size());
}

bool SmartsPattern::matches_at(const SmartsTarget& target, int atom) const {
  Embedder embedder(*graph_, target);
  return embedder.run(atom, [](const std::vector<int>&) { return true; });
}

bool SmartsPattern::matches(const SmartsTarget& target) const {
  Embedder embedder(*graph_, target);
  return embedder.run(-1, [](const std::vector<int>&) { return true; });
}

std::vector<std::vector<int>> SmartsPattern::find_all(
    const SmartsTarget& target) const {
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> out;
  Embedder embedder(*graph_, target);
  embedder.run(-1, [&](const std::vector<int>& map) {
    std::vector<int> key = map;
    std::sort(key.begin(), key.end());
    if (seen.insert(std::move(key)).second) {
      out.push_back(map);
    }
    return false;
  });
  return out;
}

}  // namespace molspo::chem
