#pragma once

// Sentence-pair filtering: length cap, language-id check, [UNK] removal,
// script rules, length-ratio limit, token truncation and language tagging.
// Plus an external-memory shuffle for whole training sets.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "mtforge/corpus.hpp"
#include "mtforge/tokenizer.hpp"

namespace mtforge {

enum class Script { Latin, Cyrillic, Greek, Arabic, Hebrew, Devanagari, Tamil, Han };

/// ISO 15924 four-letter codes: Latn, Cyrl, Grek, Arab, Hebr, Deva, Taml, Hani.
std::optional<Script> parse_script(std::string_view iso15924);
std::string_view to_string(Script script);

/// Script of a letter code point; nullopt for non-letters and scripts we do
/// not classify.
std::optional<Script> letter_script(std::int32_t cp);

/// Fraction of classified letters in `text` that are outside `required`;
/// 0 when the text has no classified letters.
double foreign_letter_fraction(std::string_view text, Script required);

inline constexpr double kRatioLadder[] = {1.5, 2.0, 2.5, 3.0};

struct FilterConfig {
  std::size_t max_words = 1024;
  std::size_t max_tokens = 512;
  double length_ratio_limit = 3.0;
  std::string unk_token = "[UNK]";
  std::map<LangCode, Script> script_rules;
  bool langid_required = false;
  /// Kept pairs get the target-language tag on their source side.
  bool add_language_tag = false;

  /// Throws InvalidArgument unless the limit is on the ratio ladder and the
  /// size caps are positive.
  void validate() const;
};

enum class RejectReason { Empty, BadLangId, TooLong, ContainsUnk, WrongScript, RatioExceeded };

std::string_view to_string(RejectReason reason);

struct FilterVerdict {
  std::optional<RejectReason> reason;
  std::optional<SentencePair> transformed;

  bool kept() const noexcept { return !reason.has_value(); }
};

using LangIdVerdict = std::pair<LangCode, LangCode>;

/// Checks run in a fixed order (Empty, BadLangId, TooLong, ContainsUnk,
/// WrongScript, RatioExceeded) and the first failure is the reason. Kept
/// pairs are truncated to cfg.max_tokens per side afterwards.
FilterVerdict apply_filters(const SentencePair& pair, const FilterConfig& cfg,
                            const SubwordTokenizer& tok,
                            const std::optional<LangIdVerdict>& langid = std::nullopt);

/// "__xx__" for the given target language.
std::string language_tag(const LangCode& lang);

/// Prefixes the target-language tag to the source. Throws AlreadyTagged if
/// the source already starts with a tag.
SentencePair prefix_language_tag(const SentencePair& pair);

bool has_language_tag(std::string_view source);

struct FilterRunReport {
  /// Manifest of the kept shards (written as manifest.tsv in the output dir).
  CorpusManifest kept;
  std::uint64_t kept_pairs = 0;
  std::map<RejectReason, std::uint64_t> rejected;
};

/// Filters every shard of `manifest` into `out_dir` (same file names) and
/// writes rejected pairs with their reason to `rejects_dir` as
/// `<name>.rejects.tsv` (`line_no reason source target`). A `<shard>.langid`
/// sidecar with `src<TAB>tgt` per line, when present, supplies the
/// language-id verdicts.
FilterRunReport filter_manifest(const CorpusManifest& manifest, const FilterConfig& cfg,
                                const SubwordTokenizer& tok, const std::filesystem::path& out_dir,
                                const std::filesystem::path& rejects_dir);

struct ShuffleOptions {
  /// Approximate in-memory budget per bucket.
  std::uint64_t memory_budget_bytes = 64ull << 20;
  /// Scratch directory; defaults to the output's directory.
  std::optional<std::filesystem::path> scratch_dir;
};

struct ShuffleReport {
  std::uint64_t lines = 0;
  std::size_t buckets = 0;
};

/// Two-pass external shuffle: lines are scattered into random bucket files,
/// then each bucket is shuffled in memory and appended in bucket order. The
/// output is a uniformly random permutation of all shard lines, identical for
/// identical (inputs, seed, options).
ShuffleReport shuffle_dataset(const CorpusManifest& manifest, std::uint64_t seed,
                              const std::filesystem::path& out_path, const ShuffleOptions& opts = {});

}  // namespace mtforge
