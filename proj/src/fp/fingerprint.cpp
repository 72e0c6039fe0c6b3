#include "molspo/fp/fingerprint.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <tuple>

namespace molspo::fp {

namespace {

const char* describe(FpErrorKind kind) {
  switch (kind) {
  case FpErrorKind::kEmptyMolecule:
    return "EmptyMolecule";
  case FpErrorKind::kWidthMismatch:
    return "WidthMismatch";
  case FpErrorKind::kBadWidth:
    return "BadWidth";
  case FpErrorKind::kBadRadius:
    return "BadRadius";
  case FpErrorKind::kBadHex:
    return "BadHex";
  }
  return "Unknown";
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out += static_cast<char>((v >> (8 * i)) & 0xff);
  }
}

}  // namespace

FpError::FpError(FpErrorKind kind) : std::runtime_error(describe(kind)), kind_(kind) { }

Fingerprint::Fingerprint(int nbits) : nbits_(nbits) {
  if (nbits < 64 || !std::has_single_bit(static_cast<unsigned>(nbits))) {
    throw FpError(FpErrorKind::kBadWidth);
  }
  words_.assign(nbits / 64, 0);
}

int Fingerprint::popcount() const {
  int n = 0;
  for (const auto w : words_) {
    n += std::popcount(w);
  }
  return n;
}

std::vector<int> Fingerprint::on_bits() const {
  std::vector<int> bits;
  for (int i = 0; i < nbits_; ++i) {
    if (test(i)) {
      bits.push_back(i);
    }
  }
  return bits;
}

std::string Fingerprint::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(nbits_ / 4);
  for (int nibble = 0; nibble < nbits_ / 4; ++nibble) {
    const auto word = words_[nibble / 16];
    out += kDigits[(word >> (4 * (nibble % 16))) & 0xf];
  }
  return out;
}

Fingerprint Fingerprint::from_hex(std::string_view hex) {
  Fingerprint fp(static_cast<int>(hex.size()) * 4);
  for (std::size_t i = 0; i < hex.size(); ++i) {
    const char c = hex[i];
    std::uint64_t v;
    if (c >= '0' && c <= '9') {
      v = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      v = c - 'a' + 10;
    } else {
      throw FpError(FpErrorKind::kBadHex);
    }
    fp.words_[i / 16] |= v << (4 * (i % 16));
  }
  return fp;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<Environment> morgan_environments(const chem::Molecule& m,
                                             int radius) {
  if (radius < 0 || radius > 4) {
    throw FpError(FpErrorKind::kBadRadius);
  }
  const int n = m.atom_count();
  std::vector<Environment> out;
  std::vector<std::uint64_t> hashes(n);
  for (int a = 0; a < n; ++a) {
    const chem::Atom& atom = m.atom(a);
    std::string code;
    code += static_cast<char>(0);
    code += static_cast<char>(atom.element);
    code += static_cast<char>(atom.charge);
    code += static_cast<char>(m.degree(a));
    code += static_cast<char>(atom.aromatic);
    hashes[a] = fnv1a64(code);
    out.push_back({a, 0, std::move(code), hashes[a]});
  }

  // Bond sets as sorted index lists; `frontier` holds atoms reached so far.
  std::vector<std::vector<int>> bond_sets(n);
  std::vector<std::vector<bool>> reached(n, std::vector<bool>(n, false));
  for (int a = 0; a < n; ++a) {
    reached[a][a] = true;
  }
  std::set<std::vector<int>> seen_sets;
  for (int r = 1; r <= radius; ++r) {
    std::vector<std::uint64_t> next(n);
    struct Candidate {
      std::vector<int> bonds;
      std::uint64_t hash;
      int atom;
      std::string code;
    };
    std::vector<Candidate> candidates;
    for (int a = 0; a < n; ++a) {
      std::vector<std::pair<int, std::uint64_t>> nbrs;
      for (const chem::Neighbor& nb : m.neighbors(a)) {
        nbrs.emplace_back(static_cast<int>(m.bond(nb.bond).order), hashes[nb.atom]);
      }
      std::sort(nbrs.begin(), nbrs.end());
      std::string code;
      code += static_cast<char>(r);
      put_u64(code, hashes[a]);
      for (const auto& [order, h] : nbrs) {
        code += static_cast<char>(order);
        put_u64(code, h);
      }
      next[a] = fnv1a64(code);

      // Grow the bond set by every bond touching an already reached atom.
      std::vector<int> grown = bond_sets[a];
      std::vector<int> newly;
      for (int b = 0; b < m.bond_count(); ++b) {
        const chem::Bond& bond = m.bond(b);
        if (reached[a][bond.begin] || reached[a][bond.end]) {
          grown.push_back(b);
          newly.push_back(bond.begin);
          newly.push_back(bond.end);
        }
      }
      std::sort(grown.begin(), grown.end());
      grown.erase(std::unique(grown.begin(), grown.end()), grown.end());
      for (const int x : newly) {
        reached[a][x] = true;
      }
      if (grown.size() != bond_sets[a].size()) {
        bond_sets[a] = grown;
        candidates.push_back({std::move(grown), next[a], a, std::move(code)});
      }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& x, const Candidate& y) {
                return std::tie(x.bonds, x.hash) < std::tie(y.bonds, y.hash);
              });
    std::vector<std::vector<int>> added;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      Candidate& c = candidates[i];
      if (i > 0 && candidates[i - 1].bonds == c.bonds) {
        continue;
      }
      if (seen_sets.contains(c.bonds)) {
        continue;
      }
      added.push_back(c.bonds);
      out.push_back({c.atom, r, std::move(c.code), c.hash});
    }
    seen_sets.insert(added.begin(), added.end());
    hashes = std::move(next);
  }
  return out;
}

Fingerprint morgan_fingerprint(const chem::Molecule& m, int radius, int nbits) {
  if (m.empty()) {
    throw FpError(FpErrorKind::kEmptyMolecule);
  }
  Fingerprint fp(nbits);
  for (const Environment& env : morgan_environments(m, radius)) {
    fp.set(static_cast<int>(env.hash % static_cast<std::uint64_t>(nbits)));
  }
  return fp;
}

double tanimoto(const Fingerprint& a, const Fingerprint& b) {
  if (a.nbits() != b.nbits()) {
    throw FpError(FpErrorKind::kWidthMismatch);
  }
  int both = 0;
  int either = 0;
  for (std::size_t i = 0; i < a.words().size(); ++i) {
    both += std::popcount(a.words()[i] & b.words()[i]);
    either += std::popcount(a.words()[i] | b.words()[i]);
  }
  return either == 0 ? 1.0 : static_cast<double>(both) / either;
}

}  // namespace molspo::fp
