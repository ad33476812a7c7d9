#pragma once

// End-to-end desk-scale run over cipher languages: synthetic data, filtering,
// shuffling, all three augmentations, sampling, routing and evaluation.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mtforge/evaluation.hpp"
#include "mtforge/routing.hpp"

namespace mtforge {

struct DemoOptions {
  /// Token-noise rate applied to direct X->Y decoding (English hops stay exact).
  double direct_noise = 0.0;
  std::size_t mono_lines = 400;
  std::size_t bitext_lines = 240;
  std::size_t dev_lines = 40;
};

struct DemoReport {
  RoutingTable routing;
  ScoreMatrix devtest_direct;
  ScoreMatrix devtest_routed;
  /// Key/value rows also written to summary.tsv.
  std::vector<std::pair<std::string, std::string>> summary;
};

/// Writes every artifact under out_dir with relative paths only, so two runs
/// with the same seed and options produce byte-identical trees.
DemoReport pipeline_demo(const std::filesystem::path& out_dir, std::uint64_t seed, const DemoOptions& opts = {});

}  // namespace mtforge
