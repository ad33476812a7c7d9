#pragma once

// Progressive-learning stages: data moves from noisy to clean, the direction
// set shrinks, and the encoder only ever deepens. Also the abstract model
// shape with per-layer provenance and checkpoint averaging.

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mtforge/corpus.hpp"
#include "mtforge/sampling.hpp"

namespace mtforge {

struct DataTier {
  /// nullopt = noisy (unfiltered) data; otherwise the clean corpus built with
  /// this length-ratio limit.
  std::optional<double> ratio_limit;

  static DataTier noisy() { return {}; }
  static DataTier clean(double ratio_limit) { return {ratio_limit}; }
  bool is_noisy() const noexcept { return !ratio_limit.has_value(); }
};

struct DirectionSet {
  /// nullopt = all directions.
  std::optional<std::set<Direction>> selected;

  static DirectionSet all() { return {}; }
  bool is_all() const noexcept { return !selected.has_value(); }
};

struct StageDescriptor {
  std::string stage_id;
  DataTier data_tier;
  DirectionSet directions;
  MixtureWeights mixture{1.0 / 3, 1.0 / 3, 1.0 / 3};
  int encoder_layers = 24;
  int decoder_layers = 12;

  /// Throws InvalidStage (ratio off the ladder, empty selection, depth < 1).
  void validate() const;
};

enum class ViolationKind { DataLoosened, DirectionsGrew, EncoderShrank, DecoderChanged };

struct Violation {
  ViolationKind kind;
  std::string message;
};

/// Empty result means the transition is allowed. Mixture weights may change
/// freely at a stage boundary.
std::vector<Violation> validate_transition(const StageDescriptor& from, const StageDescriptor& to);

struct LayerProvenance {
  enum class Kind { Inherited, FreshRandom };
  Kind kind;
  /// Stage whose weights the layer was initialized from (Inherited) or the
  /// stage that added it (FreshRandom).
  std::string stage_id;

  friend bool operator==(const LayerProvenance&, const LayerProvenance&) = default;
};

struct ModelShape {
  int encoder_layers = 0;
  int decoder_layers = 0;
  /// Bottom-to-top, one entry per encoder layer.
  std::vector<LayerProvenance> layer_provenance;

  /// All encoder layers inherited from `source_id` (a pretrained checkpoint).
  static ModelShape initial(int encoder_layers, int decoder_layers, const std::string& source_id);

  std::size_t count(LayerProvenance::Kind kind) const;
};

/// Adds `extra` freshly initialized layers on top of the encoder.
ModelShape grow_encoder(const ModelShape& shape, int extra, const std::string& stage_id);

using ParamVector = std::vector<double>;

/// Elementwise mean. Each column is summed in sorted order with compensation,
/// so the result does not depend on checkpoint order and stays within the
/// column's [min, max].
ParamVector average_checkpoints(const std::vector<ParamVector>& checkpoints);

/// Validates each stage and every consecutive transition; throws
/// InvalidSchedule naming the first failing pair.
std::vector<StageDescriptor> stage_schedule(std::vector<StageDescriptor> stages);

/// Schedule file, one stage per line:
///   stage_id <TAB> noisy|clean:R <TAB> all|src-tgt,... <TAB> l1,l2,l3 <TAB> enc <TAB> dec
std::vector<StageDescriptor> load_schedule(const std::filesystem::path& path);
void write_schedule(const std::vector<StageDescriptor>& stages, const std::filesystem::path& path);

/// Three stages: noisy/all/24L, clean(2.0)/selected/24L, clean(1.5)/selected/36L.
/// The mixture starts at equal weights and resets to (0.6, 0.2, 0.2) after
/// the first stage.
std::vector<StageDescriptor> progressive_ladder(const std::set<Direction>& selected);

}  // namespace mtforge
