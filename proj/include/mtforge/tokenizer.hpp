#pragma once

// Deterministic subword tokenizer: greedy longest match over a scored
// vocabulary with per-character fallback. Spaces are mapped to the U+2581
// meta symbol and a leading one is added, so detokenize(tokenize(s)) == s for
// every byte string s.

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mtforge {

inline constexpr std::string_view kMetaSpace = "\xE2\x96\x81";  // U+2581
// Escapes used by the fallback path; vocabulary pieces may not take these forms.
inline constexpr std::string_view kLiteralMetaPiece = "<U+2581>";

class SubwordTokenizer {
 public:
  /// Character-level tokenizer (empty vocabulary).
  SubwordTokenizer() = default;

  /// Pieces use the U+2581 meta symbol for a preceding space, as in
  /// SentencePiece vocabularies. Throws InvalidArgument on reserved pieces.
  explicit SubwordTokenizer(std::vector<std::pair<std::string, double>> scored_pieces);

  /// Built-in toy vocabulary: common English words with and without the word
  /// boundary marker plus frequent suffixes.
  static SubwordTokenizer builtin();

  /// Whole-word vocabulary over the given words (each as "▁word").
  static SubwordTokenizer from_words(const std::vector<std::string>& words);

  /// `piece<TAB>score` per line, SentencePiece .vocab style.
  static SubwordTokenizer load(const std::filesystem::path& path);

  std::vector<std::string> tokenize(std::string_view text) const;
  std::string detokenize(const std::vector<std::string>& tokens) const;

  std::size_t vocab_size() const noexcept { return scores_.size(); }
  bool contains(std::string_view piece) const { return scores_.count(std::string(piece)) != 0; }

 private:
  std::unordered_map<std::string, double> scores_;
  std::size_t max_piece_bytes_ = 0;
};

/// Keeps at most `max_tokens` leading tokens; returns the input unchanged when
/// it is already within the limit.
std::string truncate_tokens(std::string_view text, const SubwordTokenizer& tok, std::size_t max_tokens);

}  // namespace mtforge
