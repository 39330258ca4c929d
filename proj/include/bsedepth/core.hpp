#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace bsedepth {

/// Raised when raster dimensions or container shapes disagree.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct MaskTag;

/// Row-major raster with validated dimensions. Immutable after construction.
/// Tag distinguishes rasters that share a pixel type (image vs mask).
template <typename T, typename Tag>
class Raster {
 public:
  using value_type = T;

  Raster() = default;

  Raster(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width <= 0 || height <= 0) {
      throw StructuralError("raster dimensions must be positive, got " +
                            std::to_string(width) + "x" + std::to_string(height));
    }
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw StructuralError("raster data length " + std::to_string(data_.size()) +
                            " does not match " + std::to_string(width) + "x" +
                            std::to_string(height));
    }
    if constexpr (std::is_same_v<Tag, MaskTag>) {
      for (T v : data_) {
        if (v > 1) throw StructuralError("mask values must be 0 or 1, got " + std::to_string(int{v}));
      }
    }
  }

  /// Filled raster.
  Raster(int width, int height, T fill)
      : Raster(width, height,
               std::vector<T>(static_cast<std::size_t>(width > 0 ? width : 0) *
                                  static_cast<std::size_t>(height > 0 ? height : 0),
                              fill)) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T operator()(int x, int y) const { return data_[index(x, y)]; }
  std::span<const T> pixels() const { return data_; }
  std::span<const T> row(int y) const {
    return std::span<const T>(data_).subspan(static_cast<std::size_t>(y) * width_, width_);
  }

  template <typename U, typename OtherTag>
  bool same_shape(const Raster<U, OtherTag>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

struct GrayTag {};
struct DepthTag {};
struct MaskTag {};

/// 8-bit intensities.
using GrayImage = Raster<std::uint8_t, GrayTag>;
/// Depth in millimeters; 0 marks an invalid sensor reading.
using DepthFrame = Raster<std::uint16_t, DepthTag>;
/// Stored as 0/1 bytes so the buffer is a contiguous span (std::vector<bool> is not).
using BinaryMask = Raster<std::uint8_t, MaskTag>;

inline BinaryMask make_mask(int width, int height, std::vector<bool> const& bits) {
  std::vector<std::uint8_t> data(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) data[i] = bits[i] ? 1 : 0;
  return BinaryMask(width, height, std::move(data));
}

std::size_t mask_count(const BinaryMask& mask);

template <typename A, typename TA, typename B, typename TB>
void require_same_shape(const Raster<A, TA>& a, const Raster<B, TB>& b, std::string_view what) {
  if (!a.same_shape(b)) {
    throw StructuralError(std::string(what) + ": dimension mismatch (" +
                          std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                          " vs " + std::to_string(b.width()) + "x" +
                          std::to_string(b.height()) + ")");
  }
}

/// Quadrant box mask plus palpating-finger silhouette.
struct MaskPair {
  BinaryMask box;
  BinaryMask finger;

  MaskPair() = default;
  MaskPair(BinaryMask box_mask, BinaryMask finger_mask)
      : box(std::move(box_mask)), finger(std::move(finger_mask)) {
    require_same_shape(box, finger, "MaskPair");
  }
  friend bool operator==(const MaskPair&, const MaskPair&) = default;
};

/// One RGB-D sample: grayscale view, aligned depth, and its masks.
struct Frame {
  GrayImage gray;
  DepthFrame depth;
  MaskPair masks;

  friend bool operator==(const Frame&, const Frame&) = default;
};

enum class PressureLevel : std::uint8_t { Low = 0, Medium = 1, High = 2 };
enum class CupSize : std::uint8_t { A = 0, B = 1, C = 2 };
enum class Quadrant : std::uint8_t { LeftQ2 = 0, LeftQ3 = 1, RightQ2 = 2, RightQ3 = 3 };

inline constexpr int kNumPressureLevels = 3;
inline constexpr CupSize kAllCups[] = {CupSize::A, CupSize::B, CupSize::C};
inline constexpr Quadrant kAllQuadrants[] = {Quadrant::LeftQ2, Quadrant::LeftQ3,
                                             Quadrant::RightQ2, Quadrant::RightQ3};
inline constexpr PressureLevel kAllLevels[] = {PressureLevel::Low, PressureLevel::Medium,
                                               PressureLevel::High};

constexpr int to_index(PressureLevel level) { return static_cast<int>(level); }
PressureLevel level_from_index(int index);

std::string_view to_string(PressureLevel level);
std::string_view to_string(CupSize cup);
std::string_view to_string(Quadrant quadrant);

std::optional<PressureLevel> parse_pressure_level(std::string_view text);
std::optional<CupSize> parse_cup(std::string_view text);
std::optional<Quadrant> parse_quadrant(std::string_view text);

}  // namespace bsedepth
