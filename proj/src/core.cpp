#include "bsedepth/core.hpp"
#include "bsedepth/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bsedepth {

std::size_t mask_count(const BinaryMask& mask) {
  const auto px = mask.pixels();
  return static_cast<std::size_t>(std::count_if(px.begin(), px.end(), [](auto v) { return v != 0; }));
}

PressureLevel level_from_index(int index) {
  if (index < 0 || index >= kNumPressureLevels) {
    throw std::out_of_range("pressure level index out of range: " + std::to_string(index));
  }
  return static_cast<PressureLevel>(index);
}

std::string_view to_string(PressureLevel level) {
  switch (level) {
    case PressureLevel::Low: return "Low";
    case PressureLevel::Medium: return "Medium";
    case PressureLevel::High: return "High";
  }
  return "?";
}

std::string_view to_string(CupSize cup) {
  switch (cup) {
    case CupSize::A: return "A";
    case CupSize::B: return "B";
    case CupSize::C: return "C";
  }
  return "?";
}

std::string_view to_string(Quadrant quadrant) {
  switch (quadrant) {
    case Quadrant::LeftQ2: return "Left_Q2";
    case Quadrant::LeftQ3: return "Left_Q3";
    case Quadrant::RightQ2: return "Right_Q2";
    case Quadrant::RightQ3: return "Right_Q3";
  }
  return "?";
}

std::optional<PressureLevel> parse_pressure_level(std::string_view text) {
  for (auto level : kAllLevels) {
    if (to_string(level) == text) return level;
  }
  return std::nullopt;
}

std::optional<CupSize> parse_cup(std::string_view text) {
  for (auto cup : kAllCups) {
    if (to_string(cup) == text) return cup;
  }
  return std::nullopt;
}

std::optional<Quadrant> parse_quadrant(std::string_view text) {
  for (auto q : kAllQuadrants) {
    if (to_string(q) == text) return q;
  }
  return std::nullopt;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % bound;
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace bsedepth
