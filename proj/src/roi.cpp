#include "bsedepth/roi.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace bsedepth::roi {

BinaryMask intersect_masks(const MaskPair& pair) {
  require_same_shape(pair.box, pair.finger, "intersect_masks");
  const auto a = pair.box.pixels();
  const auto b = pair.finger.pixels();
  std::vector<std::uint8_t> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] != 0 && b[i] != 0) ? 1 : 0;
  return BinaryMask(pair.box.width(), pair.box.height(), std::move(out));
}

BinaryMask rect_mask(int width, int height, int x0, int y0, int x1, int y1) {
  x0 = std::clamp(x0, 0, width);
  x1 = std::clamp(x1, 0, width);
  y0 = std::clamp(y0, 0, height);
  y1 = std::clamp(y1, 0, height);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(width) * height, 0);
  for (int y = y0; y < y1; ++y) {
    std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(y) * width + x0, std::max(0, x1 - x0),
                std::uint8_t{1});
  }
  return BinaryMask(width, height, std::move(out));
}

double median_inplace(std::span<double> values) {
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::optional<RoiDepth> extract_scalar_depth(const DepthFrame& depth, const BinaryMask& roi,
                                             Reducer reducer) {
  require_same_shape(depth, roi, "extract_scalar_depth");
  const auto d = depth.pixels();
  const auto m = roi.pixels();
  std::vector<double> valid;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (m[i] != 0 && d[i] != 0) valid.push_back(d[i]);
  }
  if (valid.empty()) return std::nullopt;

  RoiDepth out;
  out.valid_pixel_count = valid.size();
  switch (reducer) {
    case Reducer::Median:
      out.value_mm = median_inplace(valid);
      break;
    case Reducer::Mean:
      out.value_mm = std::accumulate(valid.begin(), valid.end(), 0.0) / static_cast<double>(valid.size());
      break;
    case Reducer::Min:
      out.value_mm = *std::min_element(valid.begin(), valid.end());
      break;
  }
  return out;
}

DepthStats clip_depth_stats(std::span<const double> scalars_mm) {
  if (scalars_mm.empty()) throw DegenerateClipError("clip has no scalar depths");
  const auto [lo, hi] = std::minmax_element(scalars_mm.begin(), scalars_mm.end());
  if (!(*lo < *hi)) {
    throw DegenerateClipError("clip has fewer than two distinct depths (MIN = MAX = " +
                              std::to_string(*lo) + ")");
  }
  return DepthStats{*lo, *hi};
}

DepthStats clip_depth_stats(std::span<const RoiDepth> scalars) {
  std::vector<double> values;
  values.reserve(scalars.size());
  for (const auto& s : scalars) values.push_back(s.value_mm);
  return clip_depth_stats(std::span<const double>(values));
}

}  // namespace bsedepth::roi
