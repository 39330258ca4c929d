#include "bsedepth/pressure.hpp"

#include <algorithm>
#include <cmath>

namespace bsedepth::pressure {

Thresholds thresholds(const roi::DepthStats& stats) {
  if (!(stats.min_mm < stats.max_mm) || !std::isfinite(stats.min_mm) || !std::isfinite(stats.max_mm)) {
    throw roi::DegenerateClipError("thresholds require MIN < MAX, got MIN=" +
                                   std::to_string(stats.min_mm) +
                                   " MAX=" + std::to_string(stats.max_mm));
  }
  const double span = stats.max_mm - stats.min_mm;
  return Thresholds{0.25 * span + stats.min_mm, 0.50 * span + stats.min_mm,
                    0.75 * span + stats.min_mm};
}

namespace {

// 0 at lo, 1 at hi, clamped.
double rise(double x, double lo, double hi) { return std::clamp((x - lo) / (hi - lo), 0.0, 1.0); }

}  // namespace

FuzzyMembership membership(double depth_mm, const Thresholds& t) {
  FuzzyMembership m;
  if (depth_mm <= t.a2) {
    m.medium = rise(depth_mm, t.a1, t.a2);
    m.low = 1.0 - m.medium;
  } else {
    m.high = rise(depth_mm, t.a2, t.a3);
    m.medium = 1.0 - m.high;
  }
  return m;
}

PressureLevel crisp_label(double depth_mm, const Thresholds& t) {
  const FuzzyMembership m = membership(depth_mm, t);
  if (m.high >= m.medium && m.high >= m.low) return PressureLevel::High;
  if (m.medium >= m.low) return PressureLevel::Medium;
  return PressureLevel::Low;
}

CrispBoundaries crisp_boundaries(const Thresholds& t) {
  return CrispBoundaries{0.5 * (t.a1 + t.a2), 0.5 * (t.a2 + t.a3)};
}

}  // namespace bsedepth::pressure
