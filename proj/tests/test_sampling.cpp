#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>

#include "mtforge/error.hpp"
#include "mtforge/sampling.hpp"
#include "support.hpp"

using namespace mtforge;
using testing::code_of;
using testing::TempDir;
using testing::write_text;

namespace {

LanguageStats stats_of(std::initializer_list<std::pair<const char*, std::uint64_t>> counts) {
  LanguageStats s;
  for (const auto& [code, n] : counts) s.per_language.emplace(LangCode(code), n);
  return s;
}

double chi_square_critical(double alpha, int dof) {
  return boost::math::quantile(boost::math::complement(boost::math::chi_squared(dof), alpha));
}

// Writes one shard per (direction, pool) with `lines` lines; line text encodes
// its origin so draws can be traced back.
CorpusManifest build_corpus(const TempDir& dir,
                            std::initializer_list<std::tuple<const char*, OriginPool, int>> shards) {
  CorpusManifest m;
  int k = 0;
  for (const auto& [d, pool, lines] : shards) {
    const auto path = dir / ("s" + std::to_string(k++) + ".tsv");
    std::string body;
    for (int i = 0; i < lines; ++i) body += std::string(d) + "#" + std::to_string(i) + "\tt\n";
    write_text(path, body);
    m.shards.push_back({path, Direction::parse(d), pool, static_cast<std::uint64_t>(lines)});
  }
  return m;
}

}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("language_distribution examples") {
  const auto even = language_distribution(stats_of({{"aa", 50}, {"bb", 50}}), 3.7);
  CHECK(even.probability(LangCode("aa")) == doctest::Approx(0.5).epsilon(1e-15));

  const auto t5 = language_distribution(stats_of({{"aa", 32}, {"bb", 1}}), 5.0);
  CHECK(std::abs(t5.probability(LangCode("aa")) - 2.0 / 3.0) < 1e-12);
  CHECK(std::abs(t5.probability(LangCode("bb")) - 1.0 / 3.0) < 1e-12);

  const auto t1 = language_distribution(stats_of({{"aa", 32}, {"bb", 1}}), 1.0);
  CHECK(std::abs(t1.probability(LangCode("aa")) - 32.0 / 33.0) < 1e-12);
  CHECK(std::abs(t1.probability(LangCode("bb")) - 1.0 / 33.0) < 1e-12);
  CHECK(t1.temperature() == 1.0);
}

TEST_CASE("language_distribution errors and zero counts") {
  CHECK(code_of([] { language_distribution(stats_of({}), 5.0); }) == Errc::EmptyStats);
  CHECK(code_of([] { language_distribution(stats_of({{"aa", 0}}), 5.0); }) == Errc::EmptyStats);
  CHECK(code_of([] { language_distribution(stats_of({{"aa", 1}}), 0.0); }) == Errc::NonPositiveTemperature);
  CHECK(code_of([] { language_distribution(stats_of({{"aa", 1}}), -1.0); }) == Errc::NonPositiveTemperature);
  const auto q = language_distribution(stats_of({{"aa", 5}, {"zz", 0}}), 5.0);
  CHECK(q.probability(LangCode("zz")) == 0.0);
  CHECK(q.probability(LangCode("aa")) == 1.0);
  CHECK(q.probability(LangCode("qq")) == 0.0);
}

TEST_CASE("distribution sums to one and is positive exactly where counts are") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    LanguageStats s;
    const char* codes[] = {"aa", "bb", "cc", "dd", "ee", "ff"};
    for (const char* c : codes) s.per_language.emplace(LangCode(c), uniform_below(rng, 4) == 0 ? 0 : uniform_below(rng, 1000000));
    s.per_language[LangCode("aa")] += 1;
    const double t = 0.5 + 10.0 * uniform01(rng);
    const auto q = language_distribution(s, t);
    double sum = 0;
    for (const auto& [l, p] : q.probabilities()) {
      sum += p;
      CHECK((p > 0.0) == (s.per_language.at(l) > 0));
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("temperature monotonicity") {
  const auto s = stats_of({{"aa", 1000}, {"bb", 7}});
  double prev = INFINITY;
  for (double t : {1.0, 5.0, 100.0}) {
    const auto q = language_distribution(s, t);
    const double ratio = q.probability(LangCode("aa")) / q.probability(LangCode("bb"));
    CHECK(ratio < prev);
    CHECK(ratio > 1.0);
    prev = ratio;
  }
  CHECK(prev < 1.06);
}

TEST_CASE("scaling all counts leaves q exactly unchanged") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    LanguageStats s, scaled;
    const std::uint64_t k = 1 + uniform_below(rng, 1000);
    for (const char* c : {"aa", "bb", "cc", "dd"}) {
      const auto d = 1 + uniform_below(rng, 100000);
      s.per_language.emplace(LangCode(c), d);
      scaled.per_language.emplace(LangCode(c), d * k);
    }
    const double t = 1.0 + uniform_below(rng, 9);
    CHECK(language_distribution(s, t).probabilities() == language_distribution(scaled, t).probabilities());
  }
}

TEST_CASE("SamplingDistribution validates and samples by chi-square") {
  CHECK(code_of([] { SamplingDistribution(1.0, {{LangCode("aa"), 0.5}}); }) == Errc::InvalidArgument);
  CHECK(code_of([] { SamplingDistribution(0.0, {{LangCode("aa"), 1.0}}); }) == Errc::NonPositiveTemperature);
  CHECK(code_of([] { SamplingDistribution(1.0, {{LangCode("aa"), 1.5}, {LangCode("bb"), -0.5}}); }) == Errc::InvalidArgument);

  const auto q = language_distribution(stats_of({{"aa", 900}, {"bb", 90}, {"cc", 9}, {"dd", 1}}), 2.0);
  Rng rng(5);
  std::map<LangCode, double> hits;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits[q.sample(rng)] += 1;
  double chi2 = 0;
  for (const auto& [l, p] : q.probabilities()) chi2 += std::pow(hits[l] - n * p, 2) / (n * p);
  CHECK(chi2 < chi_square_critical(0.001, 3));
}

TEST_CASE("MixtureWeights") {
  CHECK_NOTHROW(MixtureWeights(0.6, 0.2, 0.2));
  CHECK(code_of([] { MixtureWeights(0.33, 0.33, 0.33); }) == Errc::InvalidWeights);
  CHECK(code_of([] { MixtureWeights(1.2, -0.1, -0.1); }) == Errc::InvalidWeights);
  const auto eq = MixtureWeights::normalized(0.33, 0.33, 0.33);
  for (double w : eq.values()) CHECK(w == doctest::Approx(1.0 / 3.0));
  CHECK(eq.values()[0] + eq.values()[1] + eq.values()[2] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(code_of([] { MixtureWeights::normalized(0, 0, 0); }) == Errc::InvalidWeights);
  CHECK(code_of([] { MixtureWeights::normalized(-1, 1, 1); }) == Errc::InvalidWeights);
  CHECK(MixtureWeights(1, 0, 0).weight(OriginPool::Bitext) == 1.0);
}

TEST_CASE("scheduler: degenerate mixture and empty pools") {
  TempDir dir;
  const auto m = build_corpus(dir, {{"hr-en", OriginPool::Bitext, 20}, {"en-hr", OriginPool::BackTranslation, 20}});
  const auto stats = corpus_stats(m);
  const auto dist = language_distribution(stats, 5.0);
  auto only_bitext = make_scheduler(m, stats, dist, MixtureWeights(1, 0, 0), 16, 1);
  for (int b = 0; b < 10; ++b)
    for (const auto& p : only_bitext.next_batch().pairs) CHECK(p.origin == OriginPool::Bitext);

  CHECK(code_of([&] { make_scheduler(m, stats, dist, MixtureWeights::normalized(0.33, 0.33, 0.33), 8, 1); }) ==
        Errc::EmptyPoolWithPositiveWeight);
  CHECK(code_of([&] { make_scheduler(m, stats, dist, MixtureWeights(1, 0, 0), 0, 1); }) == Errc::InvalidArgument);
  CHECK(code_of([&] { only_bitext.set_weights(MixtureWeights(0.5, 0, 0.5)); }) == Errc::EmptyPoolWithPositiveWeight);
  only_bitext.set_weights(MixtureWeights(0.5, 0.5, 0));
  CHECK(only_bitext.weights().weight(OriginPool::BackTranslation) == 0.5);
}

TEST_CASE("scheduler: batches, composition and determinism") {
  TempDir dir;
  const auto m = build_corpus(dir, {{"hr-en", OriginPool::Bitext, 30},
                                    {"hu-en", OriginPool::Bitext, 5},
                                    {"en-hr", OriginPool::BackTranslation, 10},
                                    {"hr-hu", OriginPool::DualPseudo, 10}});
  const auto stats = corpus_stats(m);
  const auto dist = language_distribution(stats, 5.0);
  const auto w = MixtureWeights(0.6, 0.2, 0.2);
  auto a = make_scheduler(m, stats, dist, w, 8, 42);
  auto b = make_scheduler(m, stats, dist, w, 8, 42);
  for (int i = 0; i < 5; ++i) {
    const auto ba = a.next_batch();
    const auto bb = b.next_batch();
    REQUIRE(ba.pairs.size() == 8);
    for (std::size_t k = 0; k < 8; ++k) {
      CHECK(ba.pairs[k].source == bb.pairs[k].source);
      CHECK(ba.pairs[k].line_no == bb.pairs[k].line_no);
      // the drawn line belongs to the direction it is labelled with
      CHECK(ba.pairs[k].source.rfind(ba.pairs[k].direction.str() + "#", 0) == 0);
    }
    std::map<std::pair<LangCode, OriginPool>, std::uint64_t> tally;
    for (const auto& p : ba.pairs) {
      ++tally[{p.direction.src(), p.origin}];
      ++tally[{p.direction.tgt(), p.origin}];
    }
    CHECK(tally == ba.composition);
  }
  auto c = make_scheduler(m, stats, dist, w, 8, 43);
  bool differs = false;
  auto d = make_scheduler(m, stats, dist, w, 8, 42);
  for (int i = 0; i < 5 && !differs; ++i) differs = c.next_batch().pairs[0].source != d.next_batch().pairs[0].source;
  CHECK(differs);
}

TEST_CASE("scheduler: single-direction manifest") {
  TempDir dir;
  const auto m = build_corpus(dir, {{"mk-en", OriginPool::Bitext, 3}});
  const auto stats = corpus_stats(m);
  auto s = make_scheduler(m, stats, language_distribution(stats, 5.0), MixtureWeights(1, 0, 0), 32, 9);
  for (const auto& p : s.next_batch().pairs) CHECK(p.direction == Direction::parse("mk-en"));
}

TEST_CASE("scheduler: direction and pool frequencies") {
  TempDir dir;
  const auto m = build_corpus(dir, {{"hr-en", OriginPool::Bitext, 50},
                                    {"hu-en", OriginPool::Bitext, 5},
                                    {"hu-hr", OriginPool::Bitext, 1},
                                    {"en-hr", OriginPool::BackTranslation, 4},
                                    {"hr-hu", OriginPool::DualPseudo, 4}});
  const auto stats = corpus_stats(m);
  const auto dist = language_distribution(stats, 5.0);
  auto s = make_scheduler(m, stats, dist, MixtureWeights(0.6, 0.2, 0.2), 1, 77);

  // product-rule direction probabilities inside the bitext pool
  const char* bitext_dirs[] = {"hr-en", "hu-en", "hu-hr"};
  double total = 0;
  for (const char* d : bitext_dirs) {
    const auto dir = Direction::parse(d);
    total += dist.probability(dir.src()) * dist.probability(dir.tgt());
  }
  for (const char* d : bitext_dirs) {
    const auto dir = Direction::parse(d);
    CHECK(s.direction_probability(OriginPool::Bitext, dir) ==
          doctest::Approx(dist.probability(dir.src()) * dist.probability(dir.tgt()) / total));
  }
  CHECK(s.direction_probability(OriginPool::Bitext, Direction::parse("mk-en")) == 0.0);

  const int n = 100000;
  std::map<OriginPool, double> pools;
  std::map<Direction, double> bitext_hits;
  double bitext_n = 0;
  for (int i = 0; i < n; ++i) {
    const auto p = s.draw();
    pools[p.origin] += 1;
    if (p.origin == OriginPool::Bitext) {
      bitext_hits[p.direction] += 1;
      bitext_n += 1;
    }
  }
  const double lambda[] = {0.6, 0.2, 0.2};
  for (OriginPool pool : kAllPools) {
    const double l = lambda[static_cast<int>(pool)];
    CHECK(std::abs(pools[pool] / n - l) < 3 * std::sqrt(l * (1 - l) / n));
  }
  double chi2 = 0;
  for (const char* d : bitext_dirs) {
    const auto dir = Direction::parse(d);
    const double e = bitext_n * s.direction_probability(OriginPool::Bitext, dir);
    chi2 += std::pow(bitext_hits[dir] - e, 2) / e;
  }
  CHECK(chi2 < chi_square_critical(0.001, 2));
}

}  // TEST_SUITE
