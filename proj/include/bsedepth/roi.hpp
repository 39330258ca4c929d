#pragma once

#include <optional>
#include <span>

#include "bsedepth/core.hpp"

namespace bsedepth::roi {

/// Scalar palpation depth of one frame.
struct RoiDepth {
  double value_mm = 0.0;
  std::size_t valid_pixel_count = 0;
};

/// Depth envelope of a clip.
struct DepthStats {
  double min_mm = 0.0;
  double max_mm = 0.0;

  friend bool operator==(const DepthStats&, const DepthStats&) = default;
};

enum class Reducer { Median, Mean, Min };

/// Thrown when a clip has fewer than two distinct scalar depths.
class DegenerateClipError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

BinaryMask intersect_masks(const MaskPair& pair);

/// Rectangle [x0, x1) x [y0, y1), clipped to the frame.
BinaryMask rect_mask(int width, int height, int x0, int y0, int x1, int y1);

/// Reduces the nonzero depths under the ROI to one value. Returns nullopt
/// when the ROI is empty or every depth under it is invalid.
std::optional<RoiDepth> extract_scalar_depth(const DepthFrame& depth, const BinaryMask& roi,
                                             Reducer reducer = Reducer::Median);

/// Median with even-count midpoint. values must be non-empty; reordered in place.
double median_inplace(std::span<double> values);

DepthStats clip_depth_stats(std::span<const RoiDepth> scalars);
DepthStats clip_depth_stats(std::span<const double> scalars_mm);

}  // namespace bsedepth::roi
