#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "bsedepth/dataio.hpp"
#include "bsedepth/features.hpp"
#include "bsedepth/learn.hpp"
#include "bsedepth/pressure.hpp"
#include "bsedepth/roi.hpp"

namespace bsedepth::pipeline {

struct FrameLabel {
  std::string clip_id;
  std::size_t frame_index = 0;
  std::optional<double> scalar_mm;  // nullopt: no valid depth under the ROI
  std::size_t valid_pixels = 0;
  std::optional<PressureLevel> label;
};

struct CellLabels {
  CupSize cup;
  Quadrant quadrant;
  roi::DepthStats stats;
  pressure::Thresholds thresholds;
  pressure::CrispBoundaries boundaries;
  std::size_t labeled_frames = 0;
};

struct LabelSet {
  roi::Reducer reducer = roi::Reducer::Median;
  std::vector<CellLabels> cells;   // canonical (cup, quadrant) order
  std::vector<FrameLabel> frames;  // clip order, then frame order

  nlohmann::json to_json() const;
  static LabelSet from_json(const nlohmann::json& j);

  /// Label of (clip, frame), nullopt if the frame had no reading or is unknown.
  std::optional<PressureLevel> find(const std::string& clip_id, std::size_t frame) const;
};

std::string_view to_string(roi::Reducer reducer);
std::optional<roi::Reducer> parse_reducer(std::string_view text);

/// Scalar depth per frame from finger AND box, depth envelope per
/// (cup, quadrant) across all of that cell's clips, then crisp labels.
/// Throws roi::DegenerateClipError naming the cell when MIN = MAX.
LabelSet compute_labels(std::span<const dataio::Clip> clips, roi::Reducer reducer = roi::Reducer::Median);

/// Text table of each cell's LOW/MEDIUM/HIGH depth ranges at one decimal.
std::string depth_range_table(const LabelSet& labels);

/// Builds one Dataset per requested scheme set from the labeled frames.
/// Descriptors for each single scheme are computed once and concatenated.
std::vector<learn::Dataset> build_datasets(std::span<const dataio::Clip> clips, const LabelSet& labels,
                                           std::span<const features::SchemeSet> schemes,
                                           const features::FeatureConfig& config = {});

}  // namespace bsedepth::pipeline
