#pragma once

// Synthetic-data planners and runner:
//  - back-translation of English monolingual text into X (X->en and en->X pairs)
//  - dual-pseudo pairs (X, Y) translated from the same English line
//  - triangulation of an existing (X1, Y1) bitext into (X1, Y2) / (X2, Y1)
//
// A plan lists tasks; each task names the translation passes it needs and how
// its output shards are assembled from line-aligned columns.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mtforge/corpus.hpp"
#include "mtforge/translator.hpp"

namespace mtforge {

enum class AugmentKind { BackTranslation, DualPseudo, Triangulation };

std::string_view to_string(AugmentKind kind);

struct CorpusRef {
  std::filesystem::path path;
  /// Monolingual corpora carry their language; bitexts their direction.
  LangCode lang = english();
  std::optional<Direction> direction;

  static CorpusRef monolingual(std::filesystem::path p, LangCode lang) { return {std::move(p), std::move(lang), {}}; }
  static CorpusRef bitext(std::filesystem::path p, Direction dir) {
    LangCode src = dir.src();
    return {std::move(p), std::move(src), std::move(dir)};
  }
  bool is_bitext() const noexcept { return direction.has_value(); }
};

/// One column of a generated shard: field 0 (the line, or a bitext's source)
/// or field 1 (a bitext's target), optionally translated along `via`.
struct Column {
  int field = 0;
  std::optional<Direction> via;

  friend auto operator<=>(const Column&, const Column&) = default;
};

struct TaskOutput {
  Direction direction;
  OriginPool origin;
  Column source;
  Column target;
};

struct AugmentationTask {
  AugmentKind kind;
  CorpusRef input;
  std::vector<Direction> needs;
  std::vector<TaskOutput> outputs;
};

struct AugmentationPlan {
  /// Iteration of back-translation this plan belongs to; part of shard names.
  int round = 1;
  std::vector<AugmentationTask> tasks;

  /// Union of the directions every task needs, sorted.
  std::vector<Direction> needed_directions() const;
};

/// One task per X: needs en->X; emits X->en and en->X pairs, both from the same
/// pass. Throws EmptyMonolingual when the English corpus has no lines.
AugmentationPlan plan_backtranslation(const CorpusRef& mono_en, const std::vector<LangCode>& langs);

/// One task per X->Y: needs en->X and en->Y. Throws EnglishInPair.
AugmentationPlan plan_dual_pseudo(const CorpusRef& mono_en, const std::vector<Direction>& pairs);

/// All K*(K-1) ordered pairs among `langs`.
std::vector<Direction> all_ordered_pairs(const std::vector<LangCode>& langs);

/// (X1, Y1) bitext: `new_tgt` Y2 yields (X1, Y2) by translating Y1->Y2,
/// `new_src` X2 yields (X2, Y1) by translating X1->X2. Throws NothingToDo
/// when neither is given.
AugmentationPlan plan_triangulation(const CorpusRef& bitext, const std::optional<LangCode>& new_src,
                                    const std::optional<LangCode>& new_tgt);

/// Concatenates plans (rounds must agree).
AugmentationPlan merge_plans(std::vector<AugmentationPlan> plans);

/// Executes every pass exactly once (passes shared between tasks are reused),
/// writes `<kind>-<task>.<src>-<tgt>.r<round>.tsv` shards plus manifest.tsv into
/// out_dir and returns the manifest. All needed directions are checked
/// before anything is written.
CorpusManifest run_plan(const AugmentationPlan& plan, const Translator& t, const DecodingConfig& cfg,
                        const std::filesystem::path& out_dir);

/// Plan file: `round<TAB>N` followed by one line per task:
///   bt   <TAB> mono_path <TAB> lang <TAB> X
///   dual <TAB> mono_path <TAB> lang <TAB> X-Y
///   tri  <TAB> bitext_path <TAB> X1-Y1 <TAB> X2|- <TAB> Y2|-
/// Tasks are re-derived on load, so the file carries only what determines them.
void write_plan(const AugmentationPlan& plan, const std::filesystem::path& path);
AugmentationPlan read_plan(const std::filesystem::path& path);

}  // namespace mtforge
