#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace molspo::tokenizer {

enum class TokenizerErrorKind : std::uint8_t {
  kEmptyCorpus,
  kVocabTooSmall,
  kUnknownCharacter,
  kUnknownId,
  kBadFile,
  kBadSequence,
};

class TokenizerError : public std::runtime_error {
 public:
  TokenizerError(TokenizerErrorKind kind, const std::string& detail);
  TokenizerErrorKind kind() const { return kind_; }

 private:
  TokenizerErrorKind kind_;
};

inline constexpr int kPad = 0;
inline constexpr int kBos = 1;
inline constexpr int kEos = 2;
inline constexpr int kSource = 3;  // precedes the source molecule
inline constexpr int kTarget = 4;  // precedes the target molecule
inline constexpr int kSpecialCount = 5;

/// Token strings and learned merges. Ids: specials, then the sorted
/// character alphabet, then one id per merge in learning order.
class Vocabulary {
 public:
  Vocabulary() = default;

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token(int id) const;
  int alphabet_size() const { return alphabet_size_; }
  const std::vector<std::pair<int, int>>& merges() const { return merges_; }

  /// Throws TokenizerError(kUnknownCharacter) naming the byte offset.
  std::vector<int> encode(std::string_view text) const;
  /// Concatenates token strings; special tokens decode to their names.
  std::string decode(std::span<const int> ids) const;

  std::string serialize() const;
  static Vocabulary parse(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  friend Vocabulary train_bpe(std::span<const std::string> texts, int vocab_size);
  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.merges_ == b.merges_;
  }

 private:
  void add_token(std::string token);
  void rebuild_index();

  std::vector<std::string> tokens_;
  std::vector<std::pair<int, int>> merges_;
  int alphabet_size_ = 0;
  std::unordered_map<char, int> char_ids_;
  std::map<std::pair<int, int>, int> merge_rank_;
};

/// Byte-pair merges learned over whole strings; the most frequent adjacent
/// pair is merged each round, ties going to the lexicographically smallest
/// (left, right) string pair. Stops at vocab_size or when no pair remains.
Vocabulary train_bpe(std::span<const std::string> texts, int vocab_size);

/// [BOS] <src> x.. <tgt> y.. [EOS] with the loss span covering y and EOS.
struct SerializedPair {
  std::vector<int> ids;
  std::size_t target_begin = 0;  // index of y_1
  std::size_t target_end = 0;    // one past EOS
};

SerializedPair serialize_pair(std::span<const int> x, std::span<const int> y);
/// Inverse of serialize_pair. Throws TokenizerError(kBadSequence).
std::pair<std::vector<int>, std::vector<int>> deserialize_pair(
    std::span<const int> ids);

/// Generation prompt: [BOS] <src> x.. <tgt>.
std::vector<int> source_prompt(std::span<const int> x);

}  // namespace molspo::tokenizer
