#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsedepth/core.hpp"
#include "bsedepth/pressure.hpp"
#include "bsedepth/roi.hpp"

namespace bsedepth::synth {

/// Reference per-(cup, quadrant) depth envelope, millimeters.
roi::DepthStats depth_envelope(CupSize cup, Quadrant quadrant);

/// Apex protrusion of the breast dome toward the camera, millimeters.
double dome_protrusion_mm(CupSize cup);

struct SynthConfig {
  CupSize cup = CupSize::A;
  Quadrant quadrant = Quadrant::LeftQ2;
  int n_frames = 100;
  int frame_size = 128;
  std::uint64_t seed = 0;
  double noise_sigma = 4.0;
  int palpation_cycles = 6;

  /// Throws std::invalid_argument on n_frames < 2 or frame_size < 64.
  void validate() const;
  friend bool operator==(const SynthConfig&, const SynthConfig&) = default;
};

struct SynthClip {
  std::vector<Frame> frames;
  std::vector<double> truth_depths;
  roi::DepthStats stats;
};

/// Press-release cycles actually used for a clip of n frames: at most the
/// configured count, and never fewer than 12 frames per cycle.
int effective_cycles(int configured_cycles, int n_frames);

SynthClip generate_clip(const SynthConfig& config);

/// Label the generator intends for a ground-truth depth of this envelope.
PressureLevel intended_label(double truth_mm, const roi::DepthStats& envelope);

enum class Split : std::uint8_t { Train = 0, Test = 1 };
std::string_view to_string(Split split);
std::optional<Split> parse_split(std::string_view text);

struct PlanCell {
  CupSize cup;
  Quadrant quadrant;
  int train_frames;
  int test_frames;
};

/// Train/test frame counts per (cup, quadrant) of the reference dataset.
std::vector<PlanCell> default_plan();

/// Settings shared by every clip of a corpus.
struct CorpusOptions {
  int frame_size = 128;
  double noise_sigma = 4.0;
  int palpation_cycles = 6;
};

struct CorpusClip {
  std::string id;
  Split split;
  SynthConfig config;
  SynthClip clip;
};

/// One train clip and one test clip per plan cell (cells with zero frames
/// for a split get no clip). Clip seeds depend only on (seed, cup, quadrant,
/// split), so reordering the plan does not change any clip.
std::vector<CorpusClip> generate_corpus(const std::vector<PlanCell>& plan, std::uint64_t seed,
                                        const CorpusOptions& options = {});

std::string clip_id(CupSize cup, Quadrant quadrant, Split split);

}  // namespace bsedepth::synth
