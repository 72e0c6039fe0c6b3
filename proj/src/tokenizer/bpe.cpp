#include "molspo/tokenizer/bpe.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace molspo::tokenizer {

namespace {

constexpr const char* kHeader = "MOLSPO-VOCAB 1";
constexpr std::string_view kSpecialNames[kSpecialCount] = {
    "<pad>", "<bos>", "<eos>", "<src>", "<tgt>"};

const char* describe(TokenizerErrorKind kind) {
  switch (kind) {
  case TokenizerErrorKind::kEmptyCorpus:
    return "EmptyCorpus";
  case TokenizerErrorKind::kVocabTooSmall:
    return "VocabTooSmall";
  case TokenizerErrorKind::kUnknownCharacter:
    return "UnknownCharacter";
  case TokenizerErrorKind::kUnknownId:
    return "UnknownId";
  case TokenizerErrorKind::kBadFile:
    return "BadFile";
  case TokenizerErrorKind::kBadSequence:
    return "BadSequence";
  }
  return "Unknown";
}

// Replaces every non-overlapping (left, right) occurrence, scanning left to
// right.
void apply_merge(std::vector<int>& word, int left, int right, int merged) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i + 1 < word.size() && word[i] == left && word[i + 1] == right) {
      word[out++] = merged;
      ++i;
    } else {
      word[out++] = word[i];
    }
  }
  word.resize(out);
}

}  // namespace

TokenizerError::TokenizerError(TokenizerErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(describe(kind)) + ": " + detail), kind_(kind) { }

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) {
    throw TokenizerError(TokenizerErrorKind::kUnknownId, std::to_string(id));
  }
  return tokens_[id];
}

void Vocabulary::add_token(std::string token) { tokens_.push_back(std::move(token)); }

void Vocabulary::rebuild_index() {
  char_ids_.clear();
  merge_rank_.clear();
  for (int id = kSpecialCount; id < kSpecialCount + alphabet_size_; ++id) {
    char_ids_[tokens_[id][0]] = id;
  }
  for (int r = 0; r < static_cast<int>(merges_.size()); ++r) {
    merge_rank_.emplace(merges_[r], r);
  }
}

std::vector<int> Vocabulary::encode(std::string_view text) const {
  std::vector<int> ids;
  ids.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto it = char_ids_.find(text[i]);
    if (it == char_ids_.end()) {
      throw TokenizerError(TokenizerErrorKind::kUnknownCharacter,
                           "offset " + std::to_string(i));
    }
    ids.push_back(it->second);
  }
  // Apply the highest-priority merge present until none applies.
  while (ids.size() > 1) {
    int best_rank = -1;
    for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
      const auto it = merge_rank_.find({ids[i], ids[i + 1]});
      if (it != merge_rank_.end() && (best_rank < 0 || it->second < best_rank)) {
        best_rank = it->second;
      }
    }
    if (best_rank < 0) {
      break;
    }
    const auto [left, right] = merges_[best_rank];
    apply_merge(ids, left, right, kSpecialCount + alphabet_size_ + best_rank);
  }
  return ids;
}

std::string Vocabulary::decode(std::span<const int> ids) const {
  std::string out;
  for (const int id : ids) {
    out += token(id);
  }
  return out;
}

std::string Vocabulary::serialize() const {
  std::ostringstream out;
  out << kHeader << "\n";
  out << "alphabet " << alphabet_size_ << "\n";
  for (int id = kSpecialCount; id < kSpecialCount + alphabet_size_; ++id) {
    out << tokens_[id] << "\n";
  }
  out << "merges " << merges_.size() << "\n";
  for (const auto& [l, r] : merges_) {
    out << l << " " << r << "\n";
  }
  return out.str();
}

Vocabulary Vocabulary::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto bad = [](const std::string& what) {
    return TokenizerError(TokenizerErrorKind::kBadFile, what);
  };
  if (!std::getline(in, line) || line != kHeader) {
    throw bad("missing header");
  }
  Vocabulary v;
  for (const auto name : kSpecialNames) {
    v.add_token(std::string(name));
  }
  std::string word;
  std::size_t count = 0;
  if (!(in >> word >> count) || word != "alphabet") {
    throw bad("missing alphabet");
  }
  std::getline(in, line);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line) || line.size() != 1) {
      throw bad("alphabet entry");
    }
    v.add_token(line);
  }
  v.alphabet_size_ = static_cast<int>(count);
  if (!(in >> word >> count) || word != "merges") {
    throw bad("missing merges");
  }
  for (std::size_t i = 0; i < count; ++i) {
    int l, r;
    if (!(in >> l >> r) || l < kSpecialCount || r < kSpecialCount ||
        l >= v.size() || r >= v.size()) {
      throw bad("merge entry");
    }
    v.merges_.emplace_back(l, r);
    v.add_token(v.tokens_[l] + v.tokens_[r]);
  }
  v.rebuild_index();
  return v;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  out << serialize();
  if (!out) {
    throw TokenizerError(TokenizerErrorKind::kBadFile, "cannot write " + path.string());
  }
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw TokenizerError(TokenizerErrorKind::kBadFile, "cannot read " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

Vocabulary train_bpe(std::span<const std::string> texts, int vocab_size) {
  if (texts.empty()) {
    throw TokenizerError(TokenizerErrorKind::kEmptyCorpus, "no texts");
  }
  std::set<char> alphabet;
  std::map<std::string, int> frequency;
  for (const std::string& t : texts) {
    alphabet.insert(t.begin(), t.end());
    ++frequency[t];
  }
  if (alphabet.empty()) {
    throw TokenizerError(TokenizerErrorKind::kEmptyCorpus, "only empty texts");
  }
  Vocabulary v;
  for (const auto name : kSpecialNames) {
    v.add_token(std::string(name));
  }
  for (const char c : alphabet) {
    v.add_token(std::string(1, c));
  }
  v.alphabet_size_ = static_cast<int>(alphabet.size());
  if (vocab_size < v.size()) {
    throw TokenizerError(TokenizerErrorKind::kVocabTooSmall,
                         "need at least " + std::to_string(v.size()));
  }
  v.rebuild_index();

  std::vector<std::vector<int>> words;
  std::vector<int> weights;
  for (const auto& [text, count] : frequency) {
    if (!text.empty()) {
      words.push_back(v.encode(text));
      weights.push_back(count);
    }
  }
  while (v.size() < vocab_size) {
    std::map<std::pair<int, int>, long long> pairs;
    for (std::size_t w = 0; w < words.size(); ++w) {
      for (std::size_t i = 0; i + 1 < words[w].size(); ++i) {
        pairs[{words[w][i], words[w][i + 1]}] += weights[w];
      }
    }
    if (pairs.empty()) {
      break;
    }
    const std::pair<int, int>* best = nullptr;
    long long best_count = 0;
    for (const auto& [pair, count] : pairs) {
      const bool better =
          best == nullptr || count > best_count ||
          (count == best_count &&
           std::tie(v.tokens_[pair.first], v.tokens_[pair.second]) <
               std::tie(v.tokens_[best->first], v.tokens_[best->second]));
      if (better) {
        best = &pair;
        best_count = count;
      }
    }
    const auto [left, right] = *best;
    const int merged = v.size();
    v.merges_.emplace_back(left, right);
    v.add_token(v.tokens_[left] + v.tokens_[right]);
    for (auto& word : words) {
      apply_merge(word, left, right, merged);
    }
  }
  v.rebuild_index();
  return v;
}

SerializedPair serialize_pair(std::span<const int> x, std::span<const int> y) {
  SerializedPair s;
  s.ids.reserve(x.size() + y.size() + 4);
  s.ids.push_back(kBos);
  s.ids.push_back(kSource);
  s.ids.insert(s.ids.end(), x.begin(), x.end());
  s.ids.push_back(kTarget);
  s.target_begin = s.ids.size();
  s.ids.insert(s.ids.end(), y.begin(), y.end());
  s.ids.push_back(kEos);
  s.target_end = s.ids.size();
  return s;
}

std::pair<std::vector<int>, std::vector<int>> deserialize_pair(
    std::span<const int> ids) {
  const auto bad = [] {
    return TokenizerError(TokenizerErrorKind::kBadSequence, "not a serialized pair");
  };
  if (ids.size() < 4 || ids[0] != kBos || ids[1] != kSource || ids.back() != kEos) {
    throw bad();
  }
  const auto split = std::find(ids.begin() + 2, ids.end(), kTarget);
  if (split == ids.end()) {
    throw bad();
  }
  std::vector<int> x(ids.begin() + 2, split);
  std::vector<int> y(split + 1, ids.end() - 1);
  for (const int id : x) {
    if (id < kSpecialCount) throw bad();
  }
  for (const int id : y) {
    if (id < kSpecialCount) throw bad();
  }
  return {std::move(x), std::move(y)};
}

std::vector<int> source_prompt(std::span<const int> x) {
  std::vector<int> ids{kBos, kSource};
  ids.insert(ids.end(), x.begin(), x.end());
  ids.push_back(kTarget);
  return ids;
}

}  // namespace molspo::tokenizer
