#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "bsedepth/core.hpp"
#include "bsedepth/synth.hpp"

namespace bsedepth::dataio {

inline constexpr std::string_view kFormatVersion = "1";

/// In-memory clip: the unit that carries a train/test declaration.
struct Clip {
  std::string id;
  CupSize cup = CupSize::A;
  Quadrant quadrant = Quadrant::LeftQ2;
  synth::Split split = synth::Split::Train;
  std::vector<Frame> frames;
  std::vector<double> truth_depths;  // empty unless the clip is synthetic
  std::optional<synth::SynthConfig> generator;

  friend bool operator==(const Clip&, const Clip&) = default;
};

Clip from_synthetic(const synth::CorpusClip& clip);
std::vector<Clip> from_synthetic(std::span<const synth::CorpusClip> corpus);

struct FramePaths {
  std::string gray, depth, boxmask, fingermask;  // relative to the dataset dir
};

struct ClipEntry {
  std::string id;
  CupSize cup;
  Quadrant quadrant;
  synth::Split split;
  std::size_t frame_count = 0;
  std::vector<FramePaths> frames;
  std::vector<double> truth_depths;
  std::optional<synth::SynthConfig> generator;
};

struct Manifest {
  std::string format_version{kFormatVersion};
  std::vector<ClipEntry> clips;

  nlohmann::json to_json() const;
  /// Schema checks only; file existence is checked by load_dataset.
  static Manifest from_json(const nlohmann::json& j);
};

/// Thrown for any invalid dataset; the message names the clip/frame at fault.
class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes dir/clips/<id>/{gray,depth,boxmask,fingermask}/<frame>.pgm and dir/manifest.json.
Manifest save_dataset(std::span<const Clip> clips, const std::filesystem::path& dir);

/// Loads and validates every clip named by the manifest. Any violation
/// rejects the whole load.
std::vector<Clip> load_dataset(const std::filesystem::path& manifest_path);

/// Canonical JSON text (sorted keys, two-space indent, trailing newline).
std::string dump_canonical(const nlohmann::json& j);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

struct FrameKey {
  std::size_t clip;   // index into the clip list
  std::size_t frame;  // index within the clip
};

struct CellSplit {
  std::vector<FrameKey> train;
  std::vector<FrameKey> test;
};

/// Frames partitioned by each clip's declared split, grouped per (cup, quadrant).
/// Within a cell, clips are visited in id order so manifest order does not matter.
std::map<std::pair<CupSize, Quadrant>, CellSplit> split_view(std::span<const Clip> clips);

}  // namespace bsedepth::dataio
