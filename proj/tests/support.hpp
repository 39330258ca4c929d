#pragma once

#include <cstdint>
#include <vector>

#include "bsedepth/core.hpp"
#include "bsedepth/features.hpp"
#include "bsedepth/learn.hpp"
#include "bsedepth/rng.hpp"

namespace bsedepth::testing {

inline GrayImage random_gray(int w, int h, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h);
  for (auto& p : px) p = static_cast<std::uint8_t>(rng.below(256));
  return GrayImage(w, h, std::move(px));
}

inline BinaryMask full_mask(int w, int h) { return BinaryMask(w, h, std::uint8_t{1}); }

inline learn::LabeledSample sample(std::vector<double> values, PressureLevel label,
                                   std::size_t index = 0) {
  features::FeatureVector fv{std::move(values), features::SchemeSet::single(features::Scheme::Law)};
  return learn::LabeledSample{std::move(fv), label, learn::SampleMeta{CupSize::A, Quadrant::LeftQ2, "c", index}};
}

/// Three Gaussian blobs in 2-D, well separated.
inline std::vector<learn::LabeledSample> blobs(int per_class, std::uint64_t seed, std::size_t index0 = 0) {
  Rng rng(seed);
  const double centers[3][2] = {{-4.0, 0.0}, {4.0, 0.0}, {0.0, 6.0}};
  std::vector<learn::LabeledSample> out;
  for (int i = 0; i < per_class; ++i) {
    for (int c = 0; c < 3; ++c) {
      out.push_back(sample({centers[c][0] + rng.normal(), centers[c][1] + rng.normal()}, level_from_index(c),
                           index0 + out.size()));
    }
  }
  return out;
}

/// XOR layout: class 0 on one diagonal, class 1 on the other, class 2 in the centre.
/// No linear function separates class 0 from class 1.
inline std::vector<learn::LabeledSample> xor_blobs(int per_cluster, std::uint64_t seed) {
  Rng rng(seed);
  const double s = 0.35;
  std::vector<learn::LabeledSample> out;
  for (int i = 0; i < per_cluster; ++i) {
    for (auto [x, y, c] : {std::tuple{-2.0, -2.0, 0}, std::tuple{2.0, 2.0, 0}, std::tuple{-2.0, 2.0, 1},
                           std::tuple{2.0, -2.0, 1}}) {
      out.push_back(sample({x + s * rng.normal(), y + s * rng.normal()}, level_from_index(c), out.size()));
    }
  }
  return out;
}

inline learn::Dataset make_dataset(std::vector<learn::LabeledSample> train, std::vector<learn::LabeledSample> test) {
  learn::Dataset d{std::move(train), std::move(test), features::SchemeSet::single(features::Scheme::Law)};
  return d;
}

}  // namespace bsedepth::testing
