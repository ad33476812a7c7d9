#pragma once

// Temperature-based language balancing and the three-pool mixture schedule
// (bitext / back-translation / dual-pseudo) used to draw training batches.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "mtforge/corpus.hpp"
#include "mtforge/rng.hpp"

namespace mtforge {

class SamplingDistribution {
 public:
  SamplingDistribution(double temperature, std::map<LangCode, double> q);

  double temperature() const noexcept { return temperature_; }
  const std::map<LangCode, double>& probabilities() const noexcept { return q_; }
  double probability(const LangCode& lang) const;

  /// Draws one language from q.
  const LangCode& sample(Rng& rng) const;

 private:
  double temperature_;
  std::map<LangCode, double> q_;
  std::vector<const LangCode*> order_;
  std::vector<double> cumulative_;
};

/// q_l proportional to p_l^(1/T) with p_l = D_l / sum D. Languages with
/// D_l = 0 get q_l = 0.
SamplingDistribution language_distribution(const LanguageStats& stats, double temperature);

class MixtureWeights {
 public:
  /// Requires each weight in [0, 1] and a sum of 1 within 1e-9.
  MixtureWeights(double bitext, double back_translation, double dual_pseudo);

  /// Rescales any non-negative triple with a positive sum, so the shorthand
  /// (0.33, 0.33, 0.33) means equal weights.
  static MixtureWeights normalized(double bitext, double back_translation, double dual_pseudo);

  double weight(OriginPool pool) const { return w_[static_cast<std::size_t>(pool)]; }
  const std::array<double, 3>& values() const noexcept { return w_; }

 private:
  std::array<double, 3> w_;
};

struct Batch {
  std::vector<SentencePair> pairs;
  /// One count per side: each pair adds to (src, pool) and (tgt, pool).
  std::map<std::pair<LangCode, OriginPool>, std::uint64_t> composition;
};

/// Draws examples with replacement: pool from the mixture weights, then a
/// direction proportional to q_src * q_tgt among that pool's directions, then
/// a line uniformly from that direction's shards. Single consumer.
class BatchScheduler {
 public:
  BatchScheduler(const CorpusManifest& manifest, const LanguageStats& stats, SamplingDistribution dist,
                 MixtureWeights weights, std::size_t batch_size, std::uint64_t seed);
  ~BatchScheduler();
  BatchScheduler(BatchScheduler&&) noexcept;
  BatchScheduler& operator=(BatchScheduler&&) noexcept;

  Batch next_batch();

  /// Draws a single example.
  SentencePair draw();

  /// Stage-boundary reconfiguration (e.g. 0.33/0.33/0.33 -> 0.6/0.2/0.2).
  void set_weights(MixtureWeights weights);

  const MixtureWeights& weights() const noexcept { return weights_; }
  std::size_t batch_size() const noexcept { return batch_size_; }

  /// Probability of drawing `dir` given `pool` under the product rule.
  double direction_probability(OriginPool pool, const Direction& dir) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  MixtureWeights weights_;
  std::size_t batch_size_;
};

BatchScheduler make_scheduler(const CorpusManifest& manifest, const LanguageStats& stats,
                              const SamplingDistribution& dist, const MixtureWeights& weights,
                              std::size_t batch_size, std::uint64_t seed);

}  // namespace mtforge
