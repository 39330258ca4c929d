#pragma once

#include <stdexcept>

#include "bsedepth/core.hpp"
#include "bsedepth/roi.hpp"

namespace bsedepth::pressure {

/// Quartile cut points of a clip's depth range.
struct Thresholds {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 0.0;
};

/// Degrees of low/medium/high pressure; components sum to 1.
struct FuzzyMembership {
  double low = 0.0;
  double medium = 0.0;
  double high = 0.0;
};

/// Crisp label transitions, where adjacent memberships cross.
struct CrispBoundaries {
  double low_medium = 0.0;
  double medium_high = 0.0;
};

/// A1 = MIN + 0.25 (MAX - MIN), A2 at 0.50, A3 at 0.75.
/// Throws roi::DegenerateClipError unless min < max.
Thresholds thresholds(const roi::DepthStats& stats);

/// Complementary linear ramps anchored at A1/A2/A3:
///   low    1 up to A1, falls to 0 at A2
///   medium rises 0 -> 1 over [A1, A2], falls 1 -> 0 over [A2, A3]
///   high   rises 0 -> 1 over [A2, A3], 1 from A3 on
/// Depths outside the anchors saturate to the pure class.
FuzzyMembership membership(double depth_mm, const Thresholds& t);

/// Argmax of membership; exact ties go to the higher pressure level.
PressureLevel crisp_label(double depth_mm, const Thresholds& t);

CrispBoundaries crisp_boundaries(const Thresholds& t);

}  // namespace bsedepth::pressure
