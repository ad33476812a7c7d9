#pragma once

// Subword-level corpus BLEU (spBLEU style) and per-direction score matrices.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mtforge/corpus.hpp"
#include "mtforge/tokenizer.hpp"
#include "mtforge/translator.hpp"

namespace mtforge {

inline constexpr int kBleuOrder = 4;

/// Sufficient statistics; corpus BLEU sums these over segments.
struct BleuStats {
  std::array<std::uint64_t, kBleuOrder> matches{};
  std::array<std::uint64_t, kBleuOrder> totals{};
  std::uint64_t hyp_len = 0;
  std::uint64_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& o);
};

struct BleuScore {
  double score = 0.0;                          // [0, 100]
  std::array<double, kBleuOrder> precisions{};  // after smoothing, in [0, 1]
  double brevity_penalty = 1.0;
  std::uint64_t hyp_len = 0;
  std::uint64_t ref_len = 0;
};

/// Clipped n-gram statistics of one tokenized segment.
BleuStats segment_stats(const std::vector<std::string>& hyp, const std::vector<std::string>& ref);

/// BLEU-4 from summed statistics. Zero match counts for n >= 2 are smoothed
/// as (m + 1) / (t + 1); a zero unigram match count yields 0. Brevity
/// penalty exp(1 - r/h) when h < r.
BleuScore bleu_from_stats(const BleuStats& stats);

/// Pre-tokenized corpus BLEU. Throws LengthMismatch / EmptyCorpus.
BleuScore corpus_bleu_tokens(const std::vector<std::vector<std::string>>& hyps,
                             const std::vector<std::vector<std::string>>& refs);

BleuScore corpus_bleu(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                      const SubwordTokenizer& tok);

/// One line: score p1 p2 p3 p4 bp hyp_len ref_len (score and precisions in
/// percent with two decimals, bp with six).
std::string format_bleu_line(const BleuScore& s);

struct Direct {};
struct PivotVia {
  LangCode pivot;
};
using DecodeStrategy = std::variant<Direct, PivotVia>;

struct ScoreMatrix {
  std::map<Direction, BleuScore> scores;
  /// Hub language for the aggregate classes (English by default).
  LangCode hub = english();

  /// Means over X->hub, hub->Y, X->Y (neither side is the hub) and all
  /// directions; nullopt when a class is empty.
  std::optional<double> avg_x_to_hub() const;
  std::optional<double> avg_hub_to_y() const;
  std::optional<double> avg_x_to_y() const;
  std::optional<double> avg_all() const;
};

/// TSV: header, then `src tgt score p1 p2 p3 p4 bp hyp_len ref_len` rows,
/// then `#avg` rows for the four aggregate classes.
void write_score_matrix(const ScoreMatrix& m, const std::filesystem::path& path);
ScoreMatrix read_score_matrix(const std::filesystem::path& path);

struct DevSet {
  std::vector<std::string> sources;
  std::vector<std::string> references;
};

using DevSetMap = std::map<Direction, DevSet>;

/// Loads each shard of a manifest as (sources, references) for its direction.
DevSetMap load_devsets(const CorpusManifest& manifest);

/// Scores every direction. Under PivotVia, directions into or out of the pivot
/// language are decoded directly.
ScoreMatrix evaluate_directions(const Translator& t, const DevSetMap& devset, const DecodingConfig& cfg,
                                const DecodeStrategy& strategy, const SubwordTokenizer& tok);

}  // namespace mtforge
