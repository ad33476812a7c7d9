#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mtforge/curriculum.hpp"
#include "mtforge/error.hpp"
#include "mtforge/rng.hpp"
#include "support.hpp"

using namespace mtforge;
using testing::code_of;
using Kind = LayerProvenance::Kind;

namespace {

const LangCode hr{"hr"}, hu{"hu"}, mk{"mk"};

StageDescriptor stage(std::string id, DataTier tier, DirectionSet dirs, int enc = 24, int dec = 12) {
  StageDescriptor s;
  s.stage_id = std::move(id);
  s.data_tier = tier;
  s.directions = std::move(dirs);
  s.encoder_layers = enc;
  s.decoder_layers = dec;
  return s;
}

DirectionSet only(std::set<Direction> dirs) { return DirectionSet{std::move(dirs)}; }

std::vector<ViolationKind> kinds(const std::vector<Violation>& vs) {
  std::vector<ViolationKind> out;
  for (const auto& v : vs) out.push_back(v.kind);
  return out;
}

}  // namespace

TEST_SUITE("curriculum") {

TEST_CASE("allowed transitions") {
  const std::set<Direction> two{Direction(hr, hu), Direction(hu, hr)};
  CHECK(validate_transition(stage("a", DataTier::noisy(), DirectionSet::all()),
                            stage("b", DataTier::clean(2.0), only(two)))
            .empty());
  CHECK(validate_transition(stage("a", DataTier::clean(2.0), only(two)),
                            stage("b", DataTier::clean(1.5), only({Direction(hr, hu)}), 36))
            .empty());
  CHECK(validate_transition(stage("a", DataTier::noisy(), DirectionSet::all()),
                            stage("b", DataTier::noisy(), DirectionSet::all()))
            .empty());
  // mixture changes are free
  auto a = stage("a", DataTier::clean(2.0), only(two));
  auto b = a;
  b.stage_id = "b";
  b.mixture = MixtureWeights(0.6, 0.2, 0.2);
  CHECK(validate_transition(a, b).empty());
}

TEST_CASE("each kind of violation is reported") {
  const std::set<Direction> two{Direction(hr, hu), Direction(hu, hr)};
  CHECK(kinds(validate_transition(stage("a", DataTier::clean(2.0), only(two)),
                                  stage("b", DataTier::noisy(), only(two)))) ==
        std::vector{ViolationKind::DataLoosened});
  CHECK(kinds(validate_transition(stage("a", DataTier::clean(1.5), only(two)),
                                  stage("b", DataTier::clean(2.0), only(two)))) ==
        std::vector{ViolationKind::DataLoosened});
  CHECK(kinds(validate_transition(stage("a", DataTier::clean(2.0), only(two)),
                                  stage("b", DataTier::clean(2.0), DirectionSet::all()))) ==
        std::vector{ViolationKind::DirectionsGrew});
  CHECK(kinds(validate_transition(stage("a", DataTier::clean(2.0), only({Direction(hr, hu)})),
                                  stage("b", DataTier::clean(2.0), only({Direction(hu, mk)})))) ==
        std::vector{ViolationKind::DirectionsGrew});
  CHECK(kinds(validate_transition(stage("a", DataTier::clean(2.0), only(two), 36),
                                  stage("b", DataTier::clean(2.0), only(two), 24))) ==
        std::vector{ViolationKind::EncoderShrank});
  CHECK(kinds(validate_transition(stage("a", DataTier::clean(2.0), only(two), 24, 12),
                                  stage("b", DataTier::clean(2.0), only(two), 24, 6))) ==
        std::vector{ViolationKind::DecoderChanged});
  const auto all_bad = validate_transition(stage("a", DataTier::clean(1.5), only(two), 36, 12),
                                           stage("b", DataTier::noisy(), DirectionSet::all(), 24, 6));
  CHECK(all_bad.size() == 4);
}

TEST_CASE("stage validation") {
  CHECK(code_of([] { stage("a", DataTier::clean(1.75), DirectionSet::all()).validate(); }) == Errc::InvalidStage);
  CHECK(code_of([] { stage("a", DataTier::noisy(), only({})).validate(); }) == Errc::InvalidStage);
  CHECK(code_of([] { stage("a", DataTier::noisy(), DirectionSet::all(), 0).validate(); }) == Errc::InvalidStage);
  CHECK(code_of([] { stage("", DataTier::noisy(), DirectionSet::all()).validate(); }) == Errc::InvalidStage);
  CHECK_FALSE(code_of([] { stage("a", DataTier::clean(3.0), DirectionSet::all()).validate(); }));
}

TEST_CASE("encoder growth keeps old layers and appends fresh ones") {
  const auto base = ModelShape::initial(24, 12, "pretrained");
  CHECK(base.count(Kind::Inherited) == 24);
  const auto grown = grow_encoder(base, 12, "stage3");
  CHECK(grown.encoder_layers == 36);
  CHECK(grown.decoder_layers == 12);
  CHECK(grown.count(Kind::Inherited) == 24);
  CHECK(grown.count(Kind::FreshRandom) == 12);
  for (int i = 0; i < 24; ++i) CHECK(grown.layer_provenance[i] == base.layer_provenance[i]);
  for (int i = 24; i < 36; ++i) CHECK(grown.layer_provenance[i] == LayerProvenance{Kind::FreshRandom, "stage3"});

  const auto plus_one = grow_encoder(base, 1, "s");
  CHECK(plus_one.encoder_layers == 25);
  CHECK(plus_one.layer_provenance.back().kind == Kind::FreshRandom);

  const auto twice = grow_encoder(grow_encoder(base, 4, "s2"), 8, "s3");
  CHECK(twice.encoder_layers == 36);
  CHECK(twice.count(Kind::Inherited) == 24);
  CHECK(twice.count(Kind::FreshRandom) == 12);
  CHECK(twice.layer_provenance[24].stage_id == "s2");
  CHECK(twice.layer_provenance[35].stage_id == "s3");

  CHECK(code_of([&] { grow_encoder(base, 0, "s"); }) == Errc::InvalidArgument);
  CHECK(code_of([] { ModelShape::initial(0, 12, "p"); }) == Errc::InvalidArgument);
}

TEST_CASE("provenance always accounts for every layer") {
  Rng rng(4);
  auto shape = ModelShape::initial(6, 6, "p");
  for (int step = 0; step < 30; ++step) {
    const int extra = 1 + static_cast<int>(uniform_below(rng, 5));
    const int before = shape.encoder_layers;
    shape = grow_encoder(shape, extra, "s" + std::to_string(step));
    CHECK(shape.encoder_layers == before + extra);
    CHECK(shape.count(Kind::Inherited) + shape.count(Kind::FreshRandom) ==
          static_cast<std::size_t>(shape.encoder_layers));
    CHECK(shape.count(Kind::Inherited) == 6);
  }
}

TEST_CASE("checkpoint averaging examples and errors") {
  CHECK(average_checkpoints({{1.0, 2.0}, {3.0, 6.0}}) == ParamVector{2.0, 4.0});
  CHECK(average_checkpoints({{5.0, -1.0, 0.5}}) == ParamVector{5.0, -1.0, 0.5});
  CHECK(average_checkpoints({{}, {}}).empty());
  CHECK(average_checkpoints({{0.1}, {0.1}, {0.1}}) == ParamVector{0.1});
  CHECK(code_of([] { average_checkpoints({}); }) == Errc::EmptyList);
  CHECK(code_of([] { average_checkpoints({{1.0}, {1.0, 2.0}}); }) == Errc::LengthMismatch);
}

TEST_CASE("averaging matches a long-double oracle and ignores order") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = 1 + uniform_below(rng, 10);
    const auto len = 1 + uniform_below(rng, 20);
    std::vector<ParamVector> cps(n, ParamVector(len));
    for (auto& c : cps)
      for (auto& v : c) v = (uniform01(rng) * 2 - 1) * std::pow(10.0, static_cast<double>(uniform_below(rng, 4)));
    const auto mean = average_checkpoints(cps);
    for (std::size_t j = 0; j < len; ++j) {
      long double sum = 0;
      double lo = cps[0][j], hi = cps[0][j];
      for (const auto& c : cps) {
        sum += c[j];
        lo = std::min(lo, c[j]);
        hi = std::max(hi, c[j]);
      }
      const double oracle = static_cast<double>(sum / static_cast<long double>(n));
      CHECK(std::abs(mean[j] - oracle) <= 1e-12 * std::max(1.0, std::abs(oracle)));
      CHECK(mean[j] >= lo);
      CHECK(mean[j] <= hi);
    }
    auto shuffled = cps;
    for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[uniform_below(rng, i)]);
    CHECK(average_checkpoints(shuffled) == mean);
  }
}

TEST_CASE("the progressive ladder is a valid schedule") {
  const std::set<Direction> sel{Direction(hr, hu), Direction(hu, mk)};
  const auto ladder = stage_schedule(progressive_ladder(sel));
  REQUIRE(ladder.size() == 3);
  CHECK(ladder[0].data_tier.is_noisy());
  CHECK(ladder[0].directions.is_all());
  CHECK(*ladder[1].data_tier.ratio_limit == 2.0);
  CHECK(*ladder[2].data_tier.ratio_limit == 1.5);
  CHECK(*ladder[2].directions.selected == sel);
  CHECK(ladder[2].encoder_layers == 36);
  CHECK(ladder[1].mixture.values()[0] == doctest::Approx(0.6));
}

TEST_CASE("invalid schedules name the failing transition") {
  const std::set<Direction> sel{Direction(hr, hu)};
  auto stages = progressive_ladder(sel);
  stages.push_back(stage("loose", DataTier::clean(3.0), only(sel), 36));
  try {
    stage_schedule(stages);
    FAIL("expected InvalidSchedule");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidSchedule);
    CHECK(std::string(e.what()).find("clean-selected-36L -> loose") != std::string::npos);
  }
  CHECK(code_of([] { stage_schedule({}); }) == Errc::InvalidSchedule);
  auto bad_stage = progressive_ladder(sel);
  bad_stage[1].data_tier = DataTier::clean(1.7);
  CHECK(code_of([&] { stage_schedule(bad_stage); }) == Errc::InvalidStage);
  CHECK(stage_schedule({stage("only", DataTier::noisy(), DirectionSet::all())}).size() == 1);
}

TEST_CASE("schedule files round-trip") {
  testing::TempDir dir;
  const auto ladder = progressive_ladder({Direction(hr, hu), Direction(mk, hr)});
  write_schedule(ladder, dir / "s.tsv");
  const auto back = load_schedule(dir / "s.tsv");
  REQUIRE(back.size() == ladder.size());
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    CHECK(back[i].stage_id == ladder[i].stage_id);
    CHECK(back[i].data_tier.ratio_limit == ladder[i].data_tier.ratio_limit);
    CHECK(back[i].directions.selected == ladder[i].directions.selected);
    CHECK(back[i].encoder_layers == ladder[i].encoder_layers);
    CHECK(back[i].decoder_layers == ladder[i].decoder_layers);
    for (int k = 0; k < 3; ++k)
      CHECK(back[i].mixture.values()[k] == doctest::Approx(ladder[i].mixture.values()[k]).epsilon(1e-3));
  }
  testing::write_text(dir / "bad.tsv", "s1\tdirty\tall\t1,1,1\t24\t12\n");
  CHECK(code_of([&] { load_schedule(dir / "bad.tsv"); }) == Errc::MalformedFile);
  testing::write_text(dir / "bad2.tsv", "s1\tnoisy\tall\t1,1\t24\t12\n");
  CHECK(code_of([&] { load_schedule(dir / "bad2.tsv"); }) == Errc::MalformedFile);
  CHECK(code_of([&] { load_schedule(dir / "none.tsv"); }) == Errc::MissingFile);
}

}  // TEST_SUITE
