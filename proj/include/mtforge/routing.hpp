#pragma once

// Hybrid decoding: each direction is translated directly or through a pivot
// language, whichever scored higher on the validation set. Ties go to direct
// decoding, which needs one pass instead of two.

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtforge/evaluation.hpp"
#include "mtforge/translator.hpp"

namespace mtforge {

struct RouteEntry {
  /// nullopt means direct decoding.
  std::optional<LangCode> pivot;
  double bleu_direct = 0.0;
  double bleu_pivot = 0.0;

  bool is_direct() const noexcept { return !pivot.has_value(); }
};

struct RoutingTable {
  std::map<Direction, RouteEntry> entries;

  const RouteEntry& at(const Direction& dir) const;
};

/// Direct iff bleu_direct >= bleu_pivot; directions into or out of
/// `pivot_lang` are always direct. Throws DirectionSetMismatch unless both
/// matrices cover the same directions.
RoutingTable build_routing_table(const ScoreMatrix& direct, const ScoreMatrix& pivot, const LangCode& pivot_lang);

/// Throws UnknownDirection when `dir` has no entry.
std::vector<std::string> route_translate(const Translator& t, const RoutingTable& table,
                                         std::span<const std::string> sentences, const Direction& dir,
                                         const DecodingConfig& cfg = {});

/// TSV `src tgt strategy pivot_lang bleu_direct bleu_pivot`; strategy is
/// "direct" or "pivot", pivot_lang is "-" for direct routes.
void write_routing_table(const RoutingTable& table, const std::filesystem::path& path);
RoutingTable read_routing_table(const std::filesystem::path& path);

}  // namespace mtforge
