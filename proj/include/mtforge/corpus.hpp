#pragma once

// Corpus domain types, manifest ingestion, streaming pair readers and
// per-language statistics.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mtforge {

/// Lowercase ASCII language identifier, 2-8 letters ("en", "hr", "sr").
class LangCode {
 public:
  explicit LangCode(std::string code);

  const std::string& str() const noexcept { return code_; }

  friend auto operator<=>(const LangCode&, const LangCode&) = default;

 private:
  std::string code_;
};

inline const LangCode& english() {
  static const LangCode en{"en"};
  return en;
}

/// An ordered translation direction; source and target always differ.
class Direction {
 public:
  Direction(LangCode src, LangCode tgt);

  /// Parses "hr-en" (also accepts "hr→en").
  static Direction parse(std::string_view text);

  const LangCode& src() const noexcept { return src_; }
  const LangCode& tgt() const noexcept { return tgt_; }

  bool involves(const LangCode& lang) const { return src_ == lang || tgt_ == lang; }

  /// "src-tgt"
  std::string str() const { return src_.str() + "-" + tgt_.str(); }

  friend auto operator<=>(const Direction&, const Direction&) = default;

 private:
  LangCode src_;
  LangCode tgt_;
};

enum class OriginPool { Bitext, BackTranslation, DualPseudo };

inline constexpr OriginPool kAllPools[] = {OriginPool::Bitext, OriginPool::BackTranslation,
                                           OriginPool::DualPseudo};

std::string_view to_string(OriginPool pool);
/// Accepts "bitext", "back-translation"/"bt", "dual-pseudo"/"dual".
std::optional<OriginPool> parse_origin(std::string_view text);

struct SentencePair {
  std::string source;
  std::string target;
  Direction direction;
  OriginPool origin;
  std::string shard_id;
  std::uint64_t line_no;
};

struct ShardEntry {
  std::filesystem::path path;
  Direction direction;
  OriginPool origin;
  std::uint64_t declared_line_count = 0;

  /// Shards are identified by their resolved path.
  std::string id() const { return path.string(); }
};

struct CorpusManifest {
  std::vector<ShardEntry> shards;

  const ShardEntry& shard(std::string_view shard_id) const;
};

/// Reads `path<TAB>src<TAB>tgt<TAB>origin<TAB>count` records; relative paths
/// resolve against the manifest's directory.
CorpusManifest load_manifest(const std::filesystem::path& path);

/// Inverse of load_manifest. Shard paths are written relative to the
/// manifest's directory.
void write_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);

/// `p` relative to `base` when expressible, otherwise unchanged; always with
/// forward slashes. Keeps written manifests relocatable.
std::string portable_path(const std::filesystem::path& p, const std::filesystem::path& base);

/// Truncating binary output stream; creates missing parent directories and
/// throws Io when the file cannot be opened.
std::ofstream open_for_writing(const std::filesystem::path& path);

/// Streams pairs of one shard in file order. Memory use is bounded by the
/// longest line, not the shard length. Sides may be blank; rejecting those is
/// the filter's job.
class PairReader {
 public:
  explicit PairReader(const ShardEntry& shard);

  std::optional<SentencePair> next();

  std::uint64_t lines_read() const noexcept { return line_no_; }

 private:
  ShardEntry shard_;
  std::ifstream in_;
  std::string line_;
  std::uint64_t line_no_ = 0;
};

PairReader read_pairs(const CorpusManifest& manifest, std::string_view shard_id);

/// Splits one corpus line on its single tab; throws MalformedLine otherwise.
std::pair<std::string_view, std::string_view> split_pair_line(std::string_view line,
                                                              std::uint64_t line_no);

struct LanguageStats {
  std::map<LangCode, std::uint64_t> per_language;
  std::map<Direction, std::uint64_t> per_direction;

  std::uint64_t language_count(const LangCode& lang) const;
  std::uint64_t direction_count(const Direction& dir) const;
};

/// Exact line counts per direction; each pair counts once for each of its two
/// languages.
LanguageStats corpus_stats(const CorpusManifest& manifest);

std::uint64_t count_lines(const std::filesystem::path& path);

struct CountMismatch {
  std::string shard_id;
  std::uint64_t declared;
  std::uint64_t actual;
};

/// Recounts every shard against its declared line count.
std::vector<CountMismatch> verify_manifest(const CorpusManifest& manifest);

}  // namespace mtforge
