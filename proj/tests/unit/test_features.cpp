#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"

#include "bsedepth/features.hpp"
#include "bsedepth/roi.hpp"
#include "support.hpp"

using namespace bsedepth;
using namespace bsedepth::features;
using bsedepth::testing::full_mask;
using bsedepth::testing::random_gray;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Irregular ROI: a disc plus a notch, so the bounding box is larger than the ROI.
BinaryMask blob_mask(int w, int h) {
  std::vector<bool> bits(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = x - w / 2.0, dy = y - h / 2.0;
      bits[static_cast<std::size_t>(y) * w + x] = dx * dx + dy * dy < (w / 3.0) * (w / 3.0) && !(x > w / 2 && y < h / 3);
    }
  }
  return make_mask(w, h, bits);
}

GrayImage map_pixels(const GrayImage& img, auto f) {
  std::vector<std::uint8_t> px(img.pixels().begin(), img.pixels().end());
  for (auto& p : px) p = static_cast<std::uint8_t>(f(p));
  return GrayImage(img.width(), img.height(), std::move(px));
}

}  // namespace

TEST_CASE("entropy") {
  const GrayImage flat(3, 3, std::uint8_t{17});
  CHECK(entropy_feature(flat, full_mask(3, 3)) == 0.0);

  const GrayImage coin(2, 1, std::vector<std::uint8_t>{0, 255});
  CHECK(entropy_feature(coin, full_mask(2, 1)) == doctest::Approx(1.0));

  const GrayImage nine(3, 3, std::vector<std::uint8_t>{0, 0, 0, 0, 0, 128, 128, 128, 255});
  CHECK(entropy_feature(nine, full_mask(3, 3)) == doctest::Approx(1.3516441151533922).epsilon(1e-12));

  // Pixels outside the ROI are ignored.
  const GrayImage wide(4, 1, std::vector<std::uint8_t>{5, 5, 9, 200});
  CHECK(entropy_feature(wide, make_mask(4, 1, {true, true, false, false})) == 0.0);

  const auto img = random_gray(64, 64, 5);
  const double e = entropy_feature(img, full_mask(64, 64));
  CHECK(e >= 0.0);
  CHECK(e <= 8.0);

  CHECK_THROWS_AS(entropy_feature(flat, BinaryMask(3, 3, std::uint8_t{0})), RoiError);
}

TEST_CASE("shadow fraction") {
  CHECK(shadow_feature(GrayImage(4, 4, std::uint8_t{0}), full_mask(4, 4)) == 1.0);
  CHECK(shadow_feature(GrayImage(4, 4, std::uint8_t{255}), full_mask(4, 4)) == 0.0);
  const GrayImage halves(2, 2, std::vector<std::uint8_t>{10, 200, 10, 200});
  CHECK(shadow_feature(halves, full_mask(2, 2), 50) == 0.5);
}

TEST_CASE("laws histogram of a constant image puts all mass in bin 0") {
  const GrayImage flat(40, 40, std::uint8_t{90});
  const auto h = laws_histogram(flat, full_mask(40, 40));
  REQUIRE(h.size() == 144);
  for (int m = 0; m < kLawsMaps; ++m) {
    CHECK(h[static_cast<std::size_t>(m) * 16] == 1.0);
    for (int b = 1; b < 16; ++b) CHECK(h[static_cast<std::size_t>(m) * 16 + b] == 0.0);
  }
}

TEST_CASE("laws histogram ignores a brightness offset") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto img = map_pixels(random_gray(48, 40, seed), [](int v) { return v * 215 / 255; });
    const auto shifted = map_pixels(img, [](int v) { return v + 40; });
    const auto roi = blob_mask(48, 40);
    CHECK(laws_histogram(img, roi) == laws_histogram(shifted, roi));
  }
}

TEST_CASE("laws map names") {
  const auto names = laws_map_names();
  CHECK(names[0] == "L5E5");
  CHECK(names[8] == "R5R5");
}

TEST_CASE("laws step edge concentrates pair energy on the edge columns") {
  // 32x32, dark left half, bright right half.
  std::vector<std::uint8_t> px(32 * 32);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) px[static_cast<std::size_t>(y) * 32 + x] = x < 16 ? 40 : 200;
  }
  const GrayImage img(32, 32, px);
  const Box box{0, 0, 32, 32};
  const auto maps = laws_energy_maps(img, box);
  const auto oracle = reference::laws_energy_maps(img, box);
  CHECK(maps == oracle);

  // L5E5 pair: the strongest response sits right at the step, is the same in every row,
  // and columns far from the step (beyond the 5x5 support) carry much less.
  const auto& le = maps[0];
  std::int64_t edge = 0, far = 0;
  for (int y = 0; y < 32; ++y) {
    edge = std::max({edge, le[static_cast<std::size_t>(y) * 32 + 15], le[static_cast<std::size_t>(y) * 32 + 16]});
    for (int x : {4, 5, 26, 27}) far = std::max(far, le[static_cast<std::size_t>(y) * 32 + x]);
  }
  CHECK(edge > 4 * far);
  const auto row_max = std::max_element(le.begin() + 10 * 32, le.begin() + 11 * 32) - (le.begin() + 10 * 32);
  CHECK((row_max == 15 || row_max == 16));

  const auto h = laws_histogram(img, full_mask(32, 32));
  double high = 0;
  for (int b = 8; b < 16; ++b) high += h[b];
  // Only the few columns near the step reach the upper half of the scale.
  CHECK(high > 0.0);
  CHECK(high <= 8.0 / 32.0);
}

TEST_CASE("laws parallel kernel matches the reference bit for bit") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto img = random_gray(57, 43, 100 + seed);
    const auto roi = blob_mask(57, 43);
    CHECK(laws_histogram(img, roi) == reference::laws_histogram(img, roi));
    CHECK(laws_histogram(img, roi, 7) == reference::laws_histogram(img, roi, 7));
  }
}

TEST_CASE("laws energy binning rule") {
  using laws_detail::energy_bin;
  CHECK(energy_bin(0, 0, 16) == 0);
  CHECK(energy_bin(5, 0, 16) == 15);
  CHECK(energy_bin(0, 100, 16) == 0);
  CHECK(energy_bin(100, 100, 16) == 15);
  CHECK(energy_bin(1000, 100, 16) == 15);
  CHECK(energy_bin(50, 100, 16) == 7);  // 255*50*16 / 25600 = 7.97
}

TEST_CASE("lbp codes") {
  const GrayImage flat(5, 5, std::uint8_t{9});
  const auto h = lbp_histogram(flat, full_mask(5, 5));
  CHECK(h[255] == 1.0);

  std::vector<std::uint8_t> px(9, 10);
  px[4] = 200;
  CHECK(lbp_code(GrayImage(3, 3, px), 1, 1) == 0);

  // Only the top-left neighbour is at least the centre: bit 0.
  px.assign(9, 10);
  px[4] = 100;
  px[0] = 100;
  CHECK(lbp_code(GrayImage(3, 3, px), 1, 1) == 1);
  // Left neighbour is the last bit clockwise.
  px.assign(9, 10);
  px[4] = 100;
  px[3] = 150;
  CHECK(lbp_code(GrayImage(3, 3, px), 1, 1) == 128);
}

TEST_CASE("lbp histogram is normalized and invariant to monotone remaps") {
  Rng rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const auto img = map_pixels(random_gray(40, 36, 200 + trial), [](int v) { return v / 2; });
    // Random strictly increasing map from 0..127 into 0..255.
    std::array<int, 128> lut{};
    int v = static_cast<int>(rng.below(2));
    for (int i = 0; i < 128; ++i) {
      lut[i] = v;
      v += 1 + static_cast<int>(rng.below(2));
    }
    const auto remapped = map_pixels(img, [&](int p) { return lut[p]; });
    const auto roi = blob_mask(40, 36);
    const auto a = lbp_histogram(img, roi);
    CHECK(sum(a) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a == lbp_histogram(remapped, roi));
    CHECK(a == reference::lbp_histogram(img, roi));
  }
}

TEST_CASE("lbp needs an interior pixel") {
  CHECK_THROWS_AS(lbp_histogram(GrayImage(4, 4, std::uint8_t{1}), roi::rect_mask(4, 4, 0, 0, 2, 4)), RoiError);
}

TEST_CASE("scheme sets") {
  CHECK(SchemeSet({Scheme::Shadow, Scheme::Law}).name() == "ShaLaw");
  CHECK(SchemeSet({Scheme::LBP, Scheme::Law}).name() == "LawLBP");
  CHECK(SchemeSet::parse("lawlbp") == SchemeSet({Scheme::Law, Scheme::LBP}));
  CHECK(SchemeSet::parse("ShaLaw") == SchemeSet({Scheme::Shadow, Scheme::Law}));
  CHECK_FALSE(SchemeSet::parse("Foo").has_value());
  CHECK_FALSE(SchemeSet::parse("").has_value());

  const auto all = SchemeSet::singles_and_pairs();
  REQUIRE(all.size() == 10);
  std::vector<std::string> names;
  for (const auto& s : all) names.push_back(s.name());
  for (const char* n : {"Ent", "Sha", "Law", "LBP", "EntSha", "EntLaw", "EntLBP", "ShaLaw", "ShaLBP", "LawLBP"}) {
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  }
  CHECK(feature_dimension(SchemeSet({Scheme::Law, Scheme::LBP})) == 400);
  CHECK(feature_dimension(SchemeSet::single(Scheme::Entropy)) == 1);
}

TEST_CASE("extract concatenates in canonical order") {
  const GrayImage flat(20, 20, std::uint8_t{0});
  const auto m = full_mask(20, 20);
  CHECK(extract(flat, m, SchemeSet::single(Scheme::Entropy)).values == std::vector<double>{0.0});

  const auto img = random_gray(20, 20, 9);
  const auto both = extract(img, m, SchemeSet({Scheme::LBP, Scheme::Shadow}));
  REQUIRE(both.values.size() == 257);
  CHECK(both.values[0] == shadow_feature(img, m));
  CHECK(std::vector<double>(both.values.begin() + 1, both.values.end()) == lbp_histogram(img, m));
}

TEST_CASE("batch extraction matches the serial reference") {
  std::vector<GrayImage> imgs;
  for (int i = 0; i < 12; ++i) imgs.push_back(random_gray(48, 48, 300 + i));
  const auto roi = blob_mask(48, 48);
  std::vector<FrameRef> refs;
  for (const auto& im : imgs) refs.push_back({&im, &roi});
  for (const auto& set : SchemeSet::singles_and_pairs()) {
    const auto a = extract_batch(refs, set);
    const auto b = reference::extract_batch(refs, set);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].values == b[i].values);
      CHECK(a[i].scheme == set);
    }
  }
}
