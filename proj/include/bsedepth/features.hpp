#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bsedepth/core.hpp"

namespace bsedepth::features {

enum class Scheme : std::uint8_t { Entropy = 0, Shadow = 1, Law = 2, LBP = 3 };

inline constexpr Scheme kAllSchemes[] = {Scheme::Entropy, Scheme::Shadow, Scheme::Law,
                                         Scheme::LBP};

/// Short report name: "Ent", "Sha", "Law", "LBP".
std::string_view short_name(Scheme scheme);

/// Non-empty subset of schemes, always iterated in canonical order
/// Entropy < Shadow < Law < LBP.
class SchemeSet {
 public:
  /// Throws std::invalid_argument on an empty or duplicated list.
  explicit SchemeSet(std::initializer_list<Scheme> schemes);
  explicit SchemeSet(std::span<const Scheme> schemes);

  static SchemeSet single(Scheme scheme) { return SchemeSet({scheme}); }

  bool contains(Scheme scheme) const { return (bits_ >> static_cast<int>(scheme)) & 1U; }
  std::vector<Scheme> schemes() const;
  std::size_t count() const;

  /// Concatenated short names, e.g. "ShaLaw", "LawLBP".
  std::string name() const;

  /// Case-insensitive inverse of name(); nullopt when the text is not a
  /// concatenation of distinct short names.
  static std::optional<SchemeSet> parse(std::string_view text);

  /// The 4 single schemes followed by the 6 pairs, in canonical order.
  static std::vector<SchemeSet> singles_and_pairs();

  std::uint8_t bits() const { return bits_; }
  friend bool operator==(const SchemeSet&, const SchemeSet&) = default;
  friend auto operator<=>(const SchemeSet&, const SchemeSet&) = default;

 private:
  SchemeSet() = default;
  std::uint8_t bits_ = 0;
};

struct FeatureConfig {
  int shadow_threshold = 50;
  int laws_bins = 16;
};

inline constexpr int kLawsMaps = 9;
inline constexpr int kLbpBins = 256;
inline constexpr int kLawsWindow = 15;

std::size_t scheme_dimension(Scheme scheme, const FeatureConfig& config = {});
std::size_t feature_dimension(const SchemeSet& set, const FeatureConfig& config = {});

struct FeatureVector {
  std::vector<double> values;
  SchemeSet scheme;
};

/// Thrown when an ROI cannot support the requested descriptor.
class RoiError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bounding box [x0, x1) x [y0, y1) of the set pixels.
struct Box {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
};
std::optional<Box> bounding_box(const BinaryMask& mask);

/// Base-2 Shannon entropy of the ROI's 256-bin intensity histogram, in [0, 8].
double entropy_feature(const GrayImage& img, const BinaryMask& roi);

/// Fraction of ROI pixels with intensity below threshold.
double shadow_feature(const GrayImage& img, const BinaryMask& roi, int threshold = 50);

/// Laws texture-energy histogram over the ROI's bounding box:
/// 15x15 local-mean removal, the 16 masks from {L5, E5, S5, R5}, 9
/// rotation-invariant energy maps (L5L5 dropped), each histogrammed into
/// `bins` bins after scaling by its 99th-percentile energy. 9 * bins values.
/// Uses OpenMP across rows.
std::vector<double> laws_histogram(const GrayImage& img, const BinaryMask& roi, int bins = 16);

/// Per-pixel rotation-invariant energy maps over the ROI bounding box,
/// row-major, stored as 2x energy so values stay integral.
std::array<std::vector<std::int64_t>, kLawsMaps> laws_energy_maps(const GrayImage& img,
                                                                  const Box& box);

/// Names of the 9 energy maps in output order.
std::array<std::string_view, kLawsMaps> laws_map_names();

/// Basic 8-neighbour radius-1 LBP (neighbour >= centre sets the bit; bit 0 is
/// the top-left neighbour, proceeding clockwise). 256-bin histogram over ROI
/// pixels whose full 3x3 neighbourhood is inside the ROI. Uses OpenMP across rows.
std::vector<double> lbp_histogram(const GrayImage& img, const BinaryMask& roi);

std::uint8_t lbp_code(const GrayImage& img, int x, int y);

FeatureVector extract(const GrayImage& img, const BinaryMask& roi, const SchemeSet& scheme,
                      const FeatureConfig& config = {});

struct FrameRef {
  const GrayImage* image;
  const BinaryMask* roi;
};

/// Extracts every frame in parallel. Result order matches input order.
std::vector<FeatureVector> extract_batch(std::span<const FrameRef> frames, const SchemeSet& scheme,
                                         const FeatureConfig& config = {});

/// Straightforward single-threaded implementations kept as test oracles and
/// benchmark baselines. Direct 2D convolution and full sorts; shares only the
/// mask vectors and the binning rule with the production kernels.
namespace reference {

std::vector<double> laws_histogram(const GrayImage& img, const BinaryMask& roi, int bins = 16);
std::array<std::vector<std::int64_t>, kLawsMaps> laws_energy_maps(const GrayImage& img,
                                                                  const Box& box);
std::vector<double> lbp_histogram(const GrayImage& img, const BinaryMask& roi);
std::vector<FeatureVector> extract_batch(std::span<const FrameRef> frames, const SchemeSet& scheme,
                                         const FeatureConfig& config = {});

}  // namespace reference

namespace laws_detail {

inline constexpr std::array<std::array<int, 5>, 4> kVectors = {{
    {1, 4, 6, 4, 1},     // L5 level
    {-1, -2, 0, 2, 1},   // E5 edge
    {-1, 0, 2, 0, -1},   // S5 spot
    {1, -4, 6, -4, 1},   // R5 ripple
}};

/// (vertical vector, horizontal vector) index pairs forming each map.
inline constexpr std::array<std::array<int, 2>, kLawsMaps> kMapPairs = {{
    {0, 1}, {0, 2}, {0, 3}, {1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3},
}};

/// Reflect-101 index into [0, n).
inline int reflect(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

/// Bin for an energy value given the map's 99th-percentile energy.
inline int energy_bin(std::int64_t energy, std::int64_t p99, int bins) {
  if (p99 == 0) return energy == 0 ? 0 : bins - 1;
  const std::int64_t bin = (255 * energy * bins) / (256 * p99);
  return bin >= bins ? bins - 1 : static_cast<int>(bin);
}

}  // namespace laws_detail

}  // namespace bsedepth::features
