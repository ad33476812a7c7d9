#pragma once

// Translation interface plus deterministic reference translators.
//
// Cipher languages are token-level bijections of English: each language
// permutes the fixed core lexicon and leaves every other token unchanged.
// English is the identity cipher, so X->Y is cipher_Y(cipher_X^-1(s)) and all
// outputs are exactly predictable.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtforge/corpus.hpp"

namespace mtforge {

struct DecodingConfig {
  int beam_size = 4;
  double length_penalty = 1.0;

  void validate() const;
};

class Translator {
 public:
  virtual ~Translator() = default;

  virtual std::set<Direction> supported_directions() const = 0;

  bool supports(const Direction& dir) const { return supported_directions().count(dir) != 0; }

  /// Output has the same length and order as the input. Throws
  /// UnsupportedDirection for directions outside supported_directions().
  std::vector<std::string> translate(std::span<const std::string> sentences, const Direction& dir,
                                     const DecodingConfig& cfg = {}) const;

 protected:
  virtual std::vector<std::string> do_translate(std::span<const std::string> sentences, const Direction& dir,
                                                const DecodingConfig& cfg) const = 0;
};

using TranslatorPtr = std::shared_ptr<const Translator>;

std::vector<std::string> translate(const Translator& t, std::span<const std::string> sentences,
                                   const Direction& dir, const DecodingConfig& cfg = {});

struct PivotResult {
  std::vector<std::string> output;
  /// Intermediate pivot-language text, kept for auditing.
  std::vector<std::string> pivot_text;
};

/// translate(translate(s, src->pivot), pivot->tgt).
PivotResult pivot_translate(const Translator& t, std::span<const std::string> sentences, const LangCode& src,
                            const LangCode& tgt, const LangCode& pivot, const DecodingConfig& cfg = {});

class CipherLanguage {
 public:
  /// The token map is a seeded permutation of core_lexicon().
  CipherLanguage(LangCode lang, std::uint64_t seed);

  const LangCode& lang() const noexcept { return lang_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// English token -> cipher token.
  std::string_view encode_token(std::string_view token) const;
  /// Cipher token -> English token.
  std::string_view decode_token(std::string_view token) const;

  std::string encode(std::string_view sentence) const;
  std::string decode(std::string_view sentence) const;

 private:
  LangCode lang_;
  std::uint64_t seed_;
  std::unordered_map<std::string_view, std::string_view> forward_;
  std::unordered_map<std::string_view, std::string_view> backward_;
};

/// Per-language seed derived from a run seed, so `cipher:SEED` names a whole
/// family of languages.
std::uint64_t cipher_seed(std::uint64_t run_seed, const LangCode& lang);

/// Supports every ordered pair among {en} and the given languages. Throws
/// DuplicateLanguage on repeated codes or an explicit "en".
TranslatorPtr make_cipher_translator(std::vector<CipherLanguage> languages);

/// Cipher translator over `langs` with seeds from cipher_seed(run_seed, .).
TranslatorPtr make_cipher_translator(std::uint64_t run_seed, const std::set<LangCode>& langs);

inline constexpr std::string_view kNoiseMarker = "<noise>";

/// Replaces each output token with kNoiseMarker independently with
/// probability `noise_rate`. The decision is a pure function of (seed,
/// direction, sentence index, token index). When `scope` is given only those
/// directions are corrupted.
TranslatorPtr with_noise(TranslatorPtr inner, double noise_rate, std::uint64_t seed,
                         std::optional<std::set<Direction>> scope = std::nullopt);

/// Runs an external command per call with one sentence per line on stdin and
/// one per line expected on stdout. "{src}" and "{tgt}" in the command are
/// replaced by the language codes. Supports all ordered pairs among `langs`.
TranslatorPtr make_exec_translator(std::string command_template, const std::set<LangCode>& langs);

}  // namespace mtforge
