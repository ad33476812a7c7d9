#include "mtforge/curriculum.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "mtforge/cleaning.hpp"
#include "mtforge/error.hpp"
#include "mtforge/text.hpp"

namespace fs = std::filesystem;

namespace mtforge {

void StageDescriptor::validate() const {
  if (stage_id.empty()) throw Error(Errc::InvalidStage, "empty stage id");
  if (data_tier.ratio_limit &&
      std::find(std::begin(kRatioLadder), std::end(kRatioLadder), *data_tier.ratio_limit) == std::end(kRatioLadder))
    throw Error(Errc::InvalidStage, stage_id + ": clean ratio limit must be one of 1.5, 2.0, 2.5, 3.0");
  if (directions.selected && directions.selected->empty())
    throw Error(Errc::InvalidStage, stage_id + ": selected direction set is empty");
  if (encoder_layers < 1 || decoder_layers < 1) throw Error(Errc::InvalidStage, stage_id + ": layer counts must be >= 1");
}

std::vector<Violation> validate_transition(const StageDescriptor& from, const StageDescriptor& to) {
  std::vector<Violation> out;
  const auto& a = from.data_tier;
  const auto& b = to.data_tier;
  if (!a.is_noisy() && b.is_noisy()) {
    out.push_back({ViolationKind::DataLoosened, "clean data cannot return to noisy data"});
  } else if (!a.is_noisy() && *b.ratio_limit > *a.ratio_limit) {
    out.push_back({ViolationKind::DataLoosened,
                   fmt::format("ratio limit loosened from {} to {}", *a.ratio_limit, *b.ratio_limit)});
  }

  if (!from.directions.is_all()) {
    if (to.directions.is_all()) {
      out.push_back({ViolationKind::DirectionsGrew, "selected directions cannot widen back to all"});
    } else {
      for (const auto& dir : *to.directions.selected)
        if (!from.directions.selected->count(dir))
          out.push_back({ViolationKind::DirectionsGrew, "direction " + dir.str() + " added"});
    }
  }
  if (to.encoder_layers < from.encoder_layers)
    out.push_back({ViolationKind::EncoderShrank,
                   fmt::format("encoder shrinks from {} to {} layers", from.encoder_layers, to.encoder_layers)});
  if (to.decoder_layers != from.decoder_layers)
    out.push_back({ViolationKind::DecoderChanged,
                   fmt::format("decoder depth changes from {} to {}", from.decoder_layers, to.decoder_layers)});
  return out;
}

ModelShape ModelShape::initial(int encoder_layers, int decoder_layers, const std::string& source_id) {
  if (encoder_layers < 1 || decoder_layers < 1) throw Error(Errc::InvalidArgument, "layer counts must be >= 1");
  ModelShape shape{encoder_layers, decoder_layers, {}};
  shape.layer_provenance.assign(encoder_layers, {LayerProvenance::Kind::Inherited, source_id});
  return shape;
}

std::size_t ModelShape::count(LayerProvenance::Kind kind) const {
  return static_cast<std::size_t>(std::count_if(layer_provenance.begin(), layer_provenance.end(),
                                                [kind](const LayerProvenance& p) { return p.kind == kind; }));
}

ModelShape grow_encoder(const ModelShape& shape, int extra, const std::string& stage_id) {
  if (extra < 1) throw Error(Errc::InvalidArgument, "encoder growth must add at least one layer");
  ModelShape grown = shape;
  grown.encoder_layers += extra;
  grown.layer_provenance.insert(grown.layer_provenance.end(), extra,
                                {LayerProvenance::Kind::FreshRandom, stage_id});
  return grown;
}

ParamVector average_checkpoints(const std::vector<ParamVector>& checkpoints) {
  if (checkpoints.empty()) throw Error(Errc::EmptyList, "no checkpoints to average");
  const std::size_t len = checkpoints.front().size();
  for (const auto& c : checkpoints)
    if (c.size() != len)
      throw Error(Errc::LengthMismatch, fmt::format("checkpoint of length {} vs {}", c.size(), len));

  const auto n = static_cast<double>(checkpoints.size());
  ParamVector mean(len);
  std::vector<double> column(checkpoints.size());
  for (std::size_t j = 0; j < len; ++j) {
    for (std::size_t i = 0; i < checkpoints.size(); ++i) column[i] = checkpoints[i][j];
    std::sort(column.begin(), column.end());
    // Neumaier summation
    double sum = 0.0, comp = 0.0;
    for (double v : column) {
      const double t = sum + v;
      comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
      sum = t;
    }
    mean[j] = std::clamp((sum + comp) / n, column.front(), column.back());
  }
  return mean;
}

std::vector<StageDescriptor> stage_schedule(std::vector<StageDescriptor> stages) {
  if (stages.empty()) throw Error(Errc::InvalidSchedule, "schedule has no stages");
  for (const auto& s : stages) s.validate();
  for (std::size_t i = 1; i < stages.size(); ++i) {
    const auto violations = validate_transition(stages[i - 1], stages[i]);
    if (violations.empty()) continue;
    std::string msg = stages[i - 1].stage_id + " -> " + stages[i].stage_id + ":";
    for (const auto& v : violations) msg += " " + v.message + ";";
    msg.pop_back();
    throw Error(Errc::InvalidSchedule, msg);
  }
  return stages;
}

namespace {

std::string format_tier(const DataTier& t) {
  return t.is_noisy() ? std::string("noisy") : fmt::format("clean:{:.1f}", *t.ratio_limit);
}

std::string format_directions(const DirectionSet& d) {
  if (d.is_all()) return "all";
  std::string out;
  for (const auto& dir : *d.selected) {
    if (!out.empty()) out += ',';
    out += dir.str();
  }
  return out;
}

}  // namespace

std::vector<StageDescriptor> load_schedule(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path)) throw Error(Errc::MissingFile, path.string());
    throw Error(Errc::Io, "cannot open " + path.string());
  }
  std::vector<StageDescriptor> stages;
  std::string line;
  std::uint64_t line_no = 0;
  auto bad = [&](const std::string& why) {
    return Error(Errc::MalformedFile, path.string() + ":" + std::to_string(line_no) + ": " + why);
  };
  auto to_double = [&](std::string_view f) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc{} || ptr != f.data() + f.size()) throw bad("bad number '" + std::string(f) + "'");
    return v;
  };
  auto to_int = [&](std::string_view f) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc{} || ptr != f.data() + f.size()) throw bad("bad integer '" + std::string(f) + "'");
    return v;
  };
  while (std::getline(in, line)) {
    ++line_no;
    text::chomp(line);
    if (text::trim(line).empty() || line.front() == '#') continue;
    const auto f = text::split(line, '\t');
    if (f.size() != 6) throw bad("expected 6 tab-separated fields");
    StageDescriptor s;
    s.stage_id = std::string(f[0]);
    if (f[1] == "noisy") {
      s.data_tier = DataTier::noisy();
    } else if (f[1].substr(0, 6) == "clean:") {
      s.data_tier = DataTier::clean(to_double(f[1].substr(6)));
    } else {
      throw bad("data tier must be noisy or clean:R");
    }
    if (f[2] != "all") {
      std::set<Direction> dirs;
      for (auto d : text::split(f[2], ','))
        if (!d.empty()) dirs.insert(Direction::parse(d));
      s.directions.selected = std::move(dirs);
    }
    const auto lam = text::split(f[3], ',');
    if (lam.size() != 3) throw bad("mixture needs three weights");
    s.mixture = MixtureWeights::normalized(to_double(lam[0]), to_double(lam[1]), to_double(lam[2]));
    s.encoder_layers = to_int(f[4]);
    s.decoder_layers = to_int(f[5]);
    stages.push_back(std::move(s));
  }
  return stages;
}

void write_schedule(const std::vector<StageDescriptor>& stages, const fs::path& path) {
  auto out = open_for_writing(path);
  out << "# stage\ttier\tdirections\tmixture\tencoder\tdecoder\n";
  for (const auto& s : stages) {
    const auto& w = s.mixture.values();
    out << fmt::format("{}\t{}\t{}\t{:.4g},{:.4g},{:.4g}\t{}\t{}\n", s.stage_id, format_tier(s.data_tier),
                       format_directions(s.directions), w[0], w[1], w[2], s.encoder_layers, s.decoder_layers);
  }
  if (!out) throw Error(Errc::Io, "write failed: " + path.string());
}

std::vector<StageDescriptor> progressive_ladder(const std::set<Direction>& selected) {
  const MixtureWeights equal = MixtureWeights::normalized(0.33, 0.33, 0.33);
  const MixtureWeights bitext_heavy(0.6, 0.2, 0.2);
  return {
      StageDescriptor{"noisy-all-24L", DataTier::noisy(), DirectionSet::all(), equal, 24, 12},
      StageDescriptor{"clean-selected-24L", DataTier::clean(2.0), DirectionSet{selected}, bitext_heavy, 24, 12},
      StageDescriptor{"clean-selected-36L", DataTier::clean(1.5), DirectionSet{selected}, bitext_heavy, 36, 12},
  };
}

}  // namespace mtforge
