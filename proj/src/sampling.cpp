#include "mtforge/sampling.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "mtforge/error.hpp"

namespace mtforge {

SamplingDistribution::SamplingDistribution(double temperature, std::map<LangCode, double> q)
    : temperature_(temperature), q_(std::move(q)) {
  if (!(temperature_ > 0.0)) throw Error(Errc::NonPositiveTemperature, std::to_string(temperature_));
  double acc = 0.0;
  for (const auto& [lang, p] : q_) {
    if (!(p >= 0.0)) throw Error(Errc::InvalidArgument, "negative probability for " + lang.str());
    acc += p;
    order_.push_back(&lang);
    cumulative_.push_back(acc);
  }
  if (q_.empty() || std::abs(acc - 1.0) > 1e-9) throw Error(Errc::InvalidArgument, "probabilities must sum to 1");
}

double SamplingDistribution::probability(const LangCode& lang) const {
  auto it = q_.find(lang);
  return it == q_.end() ? 0.0 : it->second;
}

const LangCode& SamplingDistribution::sample(Rng& rng) const {
  return *order_[sample_cumulative(rng, cumulative_)];
}

SamplingDistribution language_distribution(const LanguageStats& stats, double temperature) {
  if (!(temperature > 0.0)) throw Error(Errc::NonPositiveTemperature, std::to_string(temperature));
  std::uint64_t total = 0;
  for (const auto& [lang, d] : stats.per_language) total += d;
  if (total == 0) throw Error(Errc::EmptyStats, "no language has a positive sentence count");

  // Work in log space: log q_l = log(p_l)/T - logsumexp. p_l is an exactly
  // rounded ratio of integers, so scaling every D_l by a common integer leaves
  // q bit-for-bit unchanged.
  std::map<LangCode, double> logw;
  double max_logw = -INFINITY;
  for (const auto& [lang, d] : stats.per_language) {
    if (d == 0) continue;
    const double p = static_cast<double>(d) / static_cast<double>(total);
    const double lw = std::log(p) / temperature;
    logw.emplace(lang, lw);
    max_logw = std::max(max_logw, lw);
  }
  double z = 0.0;
  for (const auto& [lang, lw] : logw) z += std::exp(lw - max_logw);
  std::map<LangCode, double> q;
  for (const auto& [lang, d] : stats.per_language)
    q.emplace(lang, d == 0 ? 0.0 : std::exp(logw.at(lang) - max_logw) / z);
  return SamplingDistribution(temperature, std::move(q));
}

MixtureWeights::MixtureWeights(double bitext, double back_translation, double dual_pseudo)
    : w_{bitext, back_translation, dual_pseudo} {
  for (double w : w_)
    if (!(w >= 0.0 && w <= 1.0)) throw Error(Errc::InvalidWeights, "each weight must lie in [0, 1]");
  if (std::abs(w_[0] + w_[1] + w_[2] - 1.0) > 1e-9)
    throw Error(Errc::InvalidWeights, "weights must sum to 1");
}

MixtureWeights MixtureWeights::normalized(double bitext, double back_translation, double dual_pseudo) {
  if (!(bitext >= 0.0 && back_translation >= 0.0 && dual_pseudo >= 0.0))
    throw Error(Errc::InvalidWeights, "weights must be non-negative");
  const double sum = bitext + back_translation + dual_pseudo;
  if (!(sum > 0.0)) throw Error(Errc::InvalidWeights, "weights must have a positive sum");
  const double a = bitext / sum, b = back_translation / sum;
  return MixtureWeights(a, b, std::max(0.0, 1.0 - a - b));
}

// ---------------------------------------------------------------------------

namespace {

// Random access to the lines of one shard through a byte-offset index.
class IndexedShard {
 public:
  explicit IndexedShard(const ShardEntry& entry) : entry_(entry), in_(entry.path, std::ios::binary) {
    if (!in_) throw Error(Errc::MissingFile, entry.path.string());
    std::string line;
    std::uint64_t offset = 0;
    while (std::getline(in_, line)) {
      offsets_.push_back(offset);
      offset += line.size() + 1;
    }
    in_.clear();
  }

  std::uint64_t size() const noexcept { return offsets_.size(); }

  SentencePair pair_at(std::uint64_t index) {
    in_.seekg(static_cast<std::streamoff>(offsets_[index]));
    std::string line;
    if (!std::getline(in_, line)) throw Error(Errc::Io, "read failed: " + entry_.path.string());
    in_.clear();
    auto [src, tgt] = split_pair_line(line, index + 1);
    return SentencePair{std::string(src), std::string(tgt), entry_.direction, entry_.origin, entry_.id(), index + 1};
  }

 private:
  ShardEntry entry_;
  std::ifstream in_;
  std::vector<std::uint64_t> offsets_;
};

struct DirectionSlot {
  Direction direction;
  std::vector<std::size_t> shards;        // indices into Impl::shards
  std::vector<std::uint64_t> cumulative;  // cumulative line counts over `shards`
  double weight = 0.0;
};

struct PoolSlot {
  std::vector<DirectionSlot> directions;
  std::vector<double> cumulative;  // cumulative direction weights
  bool empty() const { return cumulative.empty() || !(cumulative.back() > 0.0); }
};

}  // namespace

struct BatchScheduler::Impl {
  std::vector<IndexedShard> shards;
  std::array<PoolSlot, 3> pools;
  SamplingDistribution dist;
  Rng rng;

  Impl(const CorpusManifest& manifest, SamplingDistribution d, std::uint64_t seed)
      : dist(std::move(d)), rng(seed) {
    shards.reserve(manifest.shards.size());
    for (std::size_t i = 0; i < manifest.shards.size(); ++i) {
      const auto& entry = manifest.shards[i];
      shards.emplace_back(entry);
      if (shards.back().size() == 0) continue;
      auto& pool = pools[static_cast<std::size_t>(entry.origin)];
      auto it = std::find_if(pool.directions.begin(), pool.directions.end(),
                             [&](const DirectionSlot& s) { return s.direction == entry.direction; });
      if (it == pool.directions.end()) {
        pool.directions.push_back(DirectionSlot{entry.direction, {}, {}, 0.0});
        it = std::prev(pool.directions.end());
      }
      const std::uint64_t prev = it->cumulative.empty() ? 0 : it->cumulative.back();
      it->shards.push_back(i);
      it->cumulative.push_back(prev + shards.back().size());
    }
    for (auto& pool : pools) {
      // deterministic direction order regardless of manifest order
      std::sort(pool.directions.begin(), pool.directions.end(),
                [](const DirectionSlot& a, const DirectionSlot& b) { return a.direction < b.direction; });
      double acc = 0.0;
      for (auto& slot : pool.directions) {
        slot.weight = dist.probability(slot.direction.src()) * dist.probability(slot.direction.tgt());
        acc += slot.weight;
        pool.cumulative.push_back(acc);
      }
    }
  }

  SentencePair draw(const MixtureWeights& w) {
    const std::array<double, 3>& lambda = w.values();
    const std::array<double, 3> cum{lambda[0], lambda[0] + lambda[1], lambda[0] + lambda[1] + lambda[2]};
    const auto pool_index = sample_cumulative(rng, cum);
    auto& pool = pools[pool_index];
    auto& slot = pool.directions[sample_cumulative(rng, pool.cumulative)];
    const std::uint64_t line = uniform_below(rng, slot.cumulative.back());
    const auto k = static_cast<std::size_t>(
        std::upper_bound(slot.cumulative.begin(), slot.cumulative.end(), line) - slot.cumulative.begin());
    const std::uint64_t base = k == 0 ? 0 : slot.cumulative[k - 1];
    return shards[slot.shards[k]].pair_at(line - base);
  }

  void check(const MixtureWeights& w) const {
    for (OriginPool pool : kAllPools)
      if (w.weight(pool) > 0.0 && pools[static_cast<std::size_t>(pool)].empty())
        throw Error(Errc::EmptyPoolWithPositiveWeight, std::string(to_string(pool)));
  }
};

BatchScheduler::BatchScheduler(const CorpusManifest& manifest, const LanguageStats& /*stats*/,
                               SamplingDistribution dist, MixtureWeights weights, std::size_t batch_size,
                               std::uint64_t seed)
    : impl_(std::make_unique<Impl>(manifest, std::move(dist), seed)),
      weights_(weights),
      batch_size_(batch_size) {
  if (batch_size_ == 0) throw Error(Errc::InvalidArgument, "batch size must be positive");
  impl_->check(weights_);
}

BatchScheduler::~BatchScheduler() = default;
BatchScheduler::BatchScheduler(BatchScheduler&&) noexcept = default;
BatchScheduler& BatchScheduler::operator=(BatchScheduler&&) noexcept = default;

SentencePair BatchScheduler::draw() { return impl_->draw(weights_); }

Batch BatchScheduler::next_batch() {
  Batch batch;
  batch.pairs.reserve(batch_size_);
  for (std::size_t i = 0; i < batch_size_; ++i) {
    batch.pairs.push_back(draw());
    const auto& p = batch.pairs.back();
    ++batch.composition[{p.direction.src(), p.origin}];
    ++batch.composition[{p.direction.tgt(), p.origin}];
  }
  return batch;
}

void BatchScheduler::set_weights(MixtureWeights weights) {
  impl_->check(weights);
  weights_ = weights;
}

double BatchScheduler::direction_probability(OriginPool pool, const Direction& dir) const {
  const auto& slot = impl_->pools[static_cast<std::size_t>(pool)];
  if (slot.empty()) return 0.0;
  for (const auto& d : slot.directions)
    if (d.direction == dir) return d.weight / slot.cumulative.back();
  return 0.0;
}

BatchScheduler make_scheduler(const CorpusManifest& manifest, const LanguageStats& stats,
                              const SamplingDistribution& dist, const MixtureWeights& weights,
                              std::size_t batch_size, std::uint64_t seed) {
  return BatchScheduler(manifest, stats, dist, weights, batch_size, seed);
}

}  // namespace mtforge
