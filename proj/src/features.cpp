#include "bsedepth/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace bsedepth::features {

std::string_view short_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::Entropy: return "Ent";
    case Scheme::Shadow: return "Sha";
    case Scheme::Law: return "Law";
    case Scheme::LBP: return "LBP";
  }
  return "?";
}

SchemeSet::SchemeSet(std::initializer_list<Scheme> schemes)
    : SchemeSet(std::span<const Scheme>(schemes.begin(), schemes.size())) {}

SchemeSet::SchemeSet(std::span<const Scheme> schemes) {
  if (schemes.empty()) throw std::invalid_argument("scheme set must be non-empty");
  for (auto s : schemes) {
    const auto bit = static_cast<std::uint8_t>(1U << static_cast<int>(s));
    if (bits_ & bit) {
      throw std::invalid_argument("duplicate scheme " + std::string(short_name(s)));
    }
    bits_ |= bit;
  }
}

std::vector<Scheme> SchemeSet::schemes() const {
  std::vector<Scheme> out;
  for (auto s : kAllSchemes) {
    if (contains(s)) out.push_back(s);
  }
  return out;
}

std::size_t SchemeSet::count() const { return schemes().size(); }

std::string SchemeSet::name() const {
  std::string out;
  for (auto s : schemes()) out += short_name(s);
  return out;
}

std::optional<SchemeSet> SchemeSet::parse(std::string_view text) {
  auto lower = [](std::string_view v) {
    std::string r(v);
    for (auto& c : r) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return r;
  };
  const std::string t = lower(text);
  std::vector<Scheme> found;
  std::size_t pos = 0;
  while (pos < t.size()) {
    bool matched = false;
    for (auto s : kAllSchemes) {
      const std::string n = lower(short_name(s));
      if (t.compare(pos, n.size(), n) == 0) {
        found.push_back(s);
        pos += n.size();
        matched = true;
        break;
      }
    }
    if (!matched) return std::nullopt;
  }
  if (found.empty()) return std::nullopt;
  try {
    return SchemeSet(std::span<const Scheme>(found));
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

std::vector<SchemeSet> SchemeSet::singles_and_pairs() {
  std::vector<SchemeSet> out;
  for (auto s : kAllSchemes) out.push_back(single(s));
  for (std::size_t i = 0; i < std::size(kAllSchemes); ++i) {
    for (std::size_t j = i + 1; j < std::size(kAllSchemes); ++j) {
      out.push_back(SchemeSet({kAllSchemes[i], kAllSchemes[j]}));
    }
  }
  return out;
}

std::size_t scheme_dimension(Scheme scheme, const FeatureConfig& config) {
  switch (scheme) {
    case Scheme::Entropy:
    case Scheme::Shadow: return 1;
    case Scheme::Law: return static_cast<std::size_t>(kLawsMaps * config.laws_bins);
    case Scheme::LBP: return kLbpBins;
  }
  return 0;
}

std::size_t feature_dimension(const SchemeSet& set, const FeatureConfig& config) {
  std::size_t n = 0;
  for (auto s : set.schemes()) n += scheme_dimension(s, config);
  return n;
}

std::optional<Box> bounding_box(const BinaryMask& mask) {
  Box box{mask.width(), mask.height(), 0, 0};
  bool any = false;
  for (int y = 0; y < mask.height(); ++y) {
    const auto row = mask.row(y);
    for (int x = 0; x < mask.width(); ++x) {
      if (row[x] == 0) continue;
      any = true;
      box.x0 = std::min(box.x0, x);
      box.y0 = std::min(box.y0, y);
      box.x1 = std::max(box.x1, x + 1);
      box.y1 = std::max(box.y1, y + 1);
    }
  }
  if (!any) return std::nullopt;
  return box;
}

namespace {

std::array<std::size_t, 256> roi_histogram(const GrayImage& img, const BinaryMask& roi,
                                           const char* what) {
  require_same_shape(img, roi, what);
  std::array<std::size_t, 256> hist{};
  const auto px = img.pixels();
  const auto m = roi.pixels();
  std::size_t n = 0;
  for (std::size_t i = 0; i < px.size(); ++i) {
    if (m[i] != 0) {
      ++hist[px[i]];
      ++n;
    }
  }
  if (n == 0) throw RoiError(std::string(what) + ": empty ROI");
  return hist;
}

}  // namespace

double entropy_feature(const GrayImage& img, const BinaryMask& roi) {
  const auto hist = roi_histogram(img, roi, "entropy_feature");
  const double n = static_cast<double>(std::accumulate(hist.begin(), hist.end(), std::size_t{0}));
  double h = 0.0;
  for (auto c : hist) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h <= 0.0 ? 0.0 : h;
}

double shadow_feature(const GrayImage& img, const BinaryMask& roi, int threshold) {
  const auto hist = roi_histogram(img, roi, "shadow_feature");
  std::size_t dark = 0, n = 0;
  for (int v = 0; v < 256; ++v) {
    n += hist[v];
    if (v < threshold) dark += hist[v];
  }
  return static_cast<double>(dark) / static_cast<double>(n);
}

std::array<std::string_view, kLawsMaps> laws_map_names() {
  return {"L5E5", "L5S5", "L5R5", "E5E5", "E5S5", "E5R5", "S5S5", "S5R5", "R5R5"};
}

std::array<std::vector<std::int64_t>, kLawsMaps> laws_energy_maps(const GrayImage& img,
                                                                  const Box& box) {
  using laws_detail::kMapPairs;
  using laws_detail::kVectors;
  using laws_detail::reflect;

  const int w = box.width();
  const int h = box.height();
  const int r = kLawsWindow / 2;
  const std::size_t n = static_cast<std::size_t>(w) * h;

  // Reflect-padded patch, pad = 7 covers both the mean window and the 5-tap filters.
  const int pw = w + 2 * r;
  const int ph = h + 2 * r;
  std::vector<std::int64_t> padded(static_cast<std::size_t>(pw) * ph);
  for (int y = 0; y < ph; ++y) {
    const auto row = img.row(box.y0 + reflect(y - r, h));
    for (int x = 0; x < pw; ++x) {
      padded[static_cast<std::size_t>(y) * pw + x] = row[box.x0 + reflect(x - r, w)];
    }
  }

  // Local mean removal scaled by the window area: 225 p - sum(window). Integral.
  std::vector<std::int64_t> colsum(static_cast<std::size_t>(pw) * h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < pw; ++x) {
      std::int64_t s = 0;
      for (int k = 0; k < kLawsWindow; ++k) s += padded[static_cast<std::size_t>(y + k) * pw + x];
      colsum[static_cast<std::size_t>(y) * pw + x] = s;
    }
  }
  std::vector<std::int64_t> centered(n);
  const std::int64_t area = kLawsWindow * kLawsWindow;
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    const std::int64_t* cs = &colsum[static_cast<std::size_t>(y) * pw];
    std::int64_t s = 0;
    for (int k = 0; k < kLawsWindow; ++k) s += cs[k];
    for (int x = 0; x < w; ++x) {
      if (x > 0) s += cs[x + kLawsWindow - 1] - cs[x - 1];
      centered[static_cast<std::size_t>(y) * w + x] =
          area * padded[static_cast<std::size_t>(y + r) * pw + x + r] - s;
    }
  }

  // Separable filtering: vertical pass per vector, then horizontal pass per pair.
  std::array<std::vector<std::int64_t>, 4> vertical;
  for (auto& v : vertical) v.resize(n);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int64_t taps[5];
      for (int k = 0; k < 5; ++k) {
        taps[k] = centered[static_cast<std::size_t>(reflect(y + k - 2, h)) * w + x];
      }
      for (int i = 0; i < 4; ++i) {
        std::int64_t acc = 0;
        for (int k = 0; k < 5; ++k) acc += kVectors[i][k] * taps[k];
        vertical[i][static_cast<std::size_t>(y) * w + x] = acc;
      }
    }
  }

  auto response = [&](int vi, int hj, int x, int y) {
    const std::int64_t* row = &vertical[vi][static_cast<std::size_t>(y) * w];
    std::int64_t acc = 0;
    for (int k = 0; k < 5; ++k) acc += kVectors[hj][k] * row[reflect(x + k - 2, w)];
    return acc;
  };

  std::array<std::vector<std::int64_t>, kLawsMaps> maps;
  for (auto& m : maps) m.resize(n);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      for (int m = 0; m < kLawsMaps; ++m) {
        const int a = kMapPairs[m][0];
        const int b = kMapPairs[m][1];
        const std::int64_t e = a == b ? 2 * std::abs(response(a, a, x, y))
                                      : std::abs(response(a, b, x, y)) + std::abs(response(b, a, x, y));
        maps[m][idx] = e;
      }
    }
  }
  return maps;
}

namespace {

Box laws_box(const GrayImage& img, const BinaryMask& roi) {
  require_same_shape(img, roi, "laws_histogram");
  const auto box = bounding_box(roi);
  if (!box) throw RoiError("laws_histogram: empty ROI");
  if (box->width() < kLawsWindow || box->height() < kLawsWindow) {
    throw RoiError("laws_histogram: ROI bounding box " + std::to_string(box->width()) + "x" +
                   std::to_string(box->height()) + " is smaller than 15x15");
  }
  return *box;
}

void check_bins(int bins) {
  if (bins < 1) throw std::invalid_argument("laws_histogram: bins must be positive");
}

}  // namespace

std::vector<double> laws_histogram(const GrayImage& img, const BinaryMask& roi, int bins) {
  check_bins(bins);
  const Box box = laws_box(img, roi);
  const auto maps = laws_energy_maps(img, box);
  const int w = box.width();

  std::vector<std::size_t> inside;
  for (int y = box.y0; y < box.y1; ++y) {
    const auto row = roi.row(y);
    for (int x = box.x0; x < box.x1; ++x) {
      if (row[x] != 0) inside.push_back(static_cast<std::size_t>(y - box.y0) * w + (x - box.x0));
    }
  }
  const std::size_t count = inside.size();
  const std::size_t rank = (99 * count + 99) / 100 - 1;

  std::vector<double> out(static_cast<std::size_t>(kLawsMaps) * bins, 0.0);
#pragma omp parallel for schedule(static)
  for (int m = 0; m < kLawsMaps; ++m) {
    std::vector<std::int64_t> values(count);
    for (std::size_t i = 0; i < count; ++i) values[i] = maps[m][inside[i]];
    auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank);
    std::nth_element(values.begin(), nth, values.end());
    const std::int64_t p99 = *nth;
    std::vector<std::size_t> hist(static_cast<std::size_t>(bins), 0);
    for (std::size_t i = 0; i < count; ++i) {
      ++hist[laws_detail::energy_bin(maps[m][inside[i]], p99, bins)];
    }
    for (int b = 0; b < bins; ++b) {
      out[static_cast<std::size_t>(m) * bins + b] =
          static_cast<double>(hist[b]) / static_cast<double>(count);
    }
  }
  return out;
}

std::uint8_t lbp_code(const GrayImage& img, int x, int y) {
  // Top-left first, clockwise.
  static constexpr int dx[8] = {-1, 0, 1, 1, 1, 0, -1, -1};
  static constexpr int dy[8] = {-1, -1, -1, 0, 1, 1, 1, 0};
  const int c = img(x, y);
  int code = 0;
  for (int k = 0; k < 8; ++k) {
    if (img(x + dx[k], y + dy[k]) >= c) code |= 1 << k;
  }
  return static_cast<std::uint8_t>(code);
}

std::vector<double> lbp_histogram(const GrayImage& img, const BinaryMask& roi) {
  require_same_shape(img, roi, "lbp_histogram");
  const int w = img.width();
  const int h = img.height();
  std::array<std::size_t, kLbpBins> hist{};
  std::size_t count = 0;

#pragma omp parallel
  {
    std::array<std::size_t, kLbpBins> local{};
    std::size_t local_count = 0;
#pragma omp for schedule(static)
    for (int y = 1; y < h - 1; ++y) {
      const auto up = roi.row(y - 1);
      const auto mid = roi.row(y);
      const auto down = roi.row(y + 1);
      for (int x = 1; x < w - 1; ++x) {
        // Eroded ROI: the whole 3x3 neighbourhood must be inside.
        if (!(up[x - 1] && up[x] && up[x + 1] && mid[x - 1] && mid[x] && mid[x + 1] &&
              down[x - 1] && down[x] && down[x + 1])) {
          continue;
        }
        ++local[lbp_code(img, x, y)];
        ++local_count;
      }
    }
#pragma omp critical
    {
      for (int b = 0; b < kLbpBins; ++b) hist[b] += local[b];
      count += local_count;
    }
  }

  if (count == 0) throw RoiError("lbp_histogram: ROI is empty after 1-pixel erosion");
  std::vector<double> out(kLbpBins);
  for (int b = 0; b < kLbpBins; ++b) {
    out[b] = static_cast<double>(hist[b]) / static_cast<double>(count);
  }
  return out;
}

namespace {

template <typename LawsFn, typename LbpFn>
FeatureVector extract_with(const GrayImage& img, const BinaryMask& roi, const SchemeSet& scheme,
                           const FeatureConfig& config, LawsFn laws, LbpFn lbp) {
  FeatureVector fv{{}, scheme};
  fv.values.reserve(feature_dimension(scheme, config));
  for (auto s : scheme.schemes()) {
    switch (s) {
      case Scheme::Entropy:
        fv.values.push_back(entropy_feature(img, roi));
        break;
      case Scheme::Shadow:
        fv.values.push_back(shadow_feature(img, roi, config.shadow_threshold));
        break;
      case Scheme::Law: {
        const auto v = laws(img, roi, config.laws_bins);
        fv.values.insert(fv.values.end(), v.begin(), v.end());
        break;
      }
      case Scheme::LBP: {
        const auto v = lbp(img, roi);
        fv.values.insert(fv.values.end(), v.begin(), v.end());
        break;
      }
    }
  }
  return fv;
}

}  // namespace

FeatureVector extract(const GrayImage& img, const BinaryMask& roi, const SchemeSet& scheme,
                      const FeatureConfig& config) {
  return extract_with(
      img, roi, scheme, config,
      [](const GrayImage& i, const BinaryMask& r, int b) { return laws_histogram(i, r, b); },
      [](const GrayImage& i, const BinaryMask& r) { return lbp_histogram(i, r); });
}

std::vector<FeatureVector> extract_batch(std::span<const FrameRef> frames, const SchemeSet& scheme,
                                         const FeatureConfig& config) {
  std::vector<std::optional<FeatureVector>> slots(frames.size());
  std::vector<std::string> errors(frames.size());
  const auto n = static_cast<std::ptrdiff_t>(frames.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      slots[i] = extract(*frames[i].image, *frames[i].roi, scheme, config);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  std::vector<FeatureVector> out;
  out.reserve(frames.size());
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!slots[i]) throw RoiError("frame " + std::to_string(i) + ": " + errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

namespace reference {

std::array<std::vector<std::int64_t>, kLawsMaps> laws_energy_maps(const GrayImage& img,
                                                                  const Box& box) {
  using laws_detail::kMapPairs;
  using laws_detail::kVectors;
  using laws_detail::reflect;

  const int w = box.width();
  const int h = box.height();
  const int r = kLawsWindow / 2;
  auto at = [&](int x, int y) -> std::int64_t {
    return img(box.x0 + reflect(x, w), box.y0 + reflect(y, h));
  };

  std::vector<std::int64_t> centered(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int64_t s = 0;
      for (int v = -r; v <= r; ++v) {
        for (int u = -r; u <= r; ++u) s += at(x + u, y + v);
      }
      centered[static_cast<std::size_t>(y) * w + x] = kLawsWindow * kLawsWindow * at(x, y) - s;
    }
  }
  auto c_at = [&](int x, int y) {
    return centered[static_cast<std::size_t>(reflect(y, h)) * w + reflect(x, w)];
  };

  // Full 5x5 mask M[row][col] = vertical[row] * horizontal[col].
  auto convolve = [&](int vi, int hj, int x, int y) {
    std::int64_t acc = 0;
    for (int row = 0; row < 5; ++row) {
      for (int col = 0; col < 5; ++col) {
        acc += static_cast<std::int64_t>(kVectors[vi][row]) * kVectors[hj][col] *
               c_at(x + col - 2, y + row - 2);
      }
    }
    return acc;
  };

  std::array<std::vector<std::int64_t>, kLawsMaps> maps;
  for (int m = 0; m < kLawsMaps; ++m) {
    maps[m].resize(static_cast<std::size_t>(w) * h);
    const int a = kMapPairs[m][0];
    const int b = kMapPairs[m][1];
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::int64_t rab = convolve(a, b, x, y);
        const std::int64_t rba = convolve(b, a, x, y);
        maps[m][static_cast<std::size_t>(y) * w + x] = std::abs(rab) + std::abs(rba);
      }
    }
  }
  return maps;
}

std::vector<double> laws_histogram(const GrayImage& img, const BinaryMask& roi, int bins) {
  check_bins(bins);
  const Box box = laws_box(img, roi);
  const auto maps = reference::laws_energy_maps(img, box);
  std::vector<double> out;
  for (int m = 0; m < kLawsMaps; ++m) {
    std::vector<std::int64_t> values;
    for (int y = box.y0; y < box.y1; ++y) {
      for (int x = box.x0; x < box.x1; ++x) {
        if (roi(x, y) != 0) {
          values.push_back(maps[m][static_cast<std::size_t>(y - box.y0) * box.width() + (x - box.x0)]);
        }
      }
    }
    std::vector<std::int64_t> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    // Nearest-rank percentile: ceil(0.99 n) - 1, zero-based.
    std::size_t rank = 0;
    while (100 * (rank + 1) < 99 * sorted.size()) ++rank;
    const std::int64_t p99 = sorted[rank];
    std::vector<double> hist(static_cast<std::size_t>(bins), 0.0);
    for (auto e : values) hist[laws_detail::energy_bin(e, p99, bins)] += 1.0;
    for (auto& v : hist) v /= static_cast<double>(values.size());
    out.insert(out.end(), hist.begin(), hist.end());
  }
  return out;
}

std::vector<double> lbp_histogram(const GrayImage& img, const BinaryMask& roi) {
  require_same_shape(img, roi, "lbp_histogram");
  std::vector<double> hist(kLbpBins, 0.0);
  double count = 0.0;
  for (int y = 1; y + 1 < img.height(); ++y) {
    for (int x = 1; x + 1 < img.width(); ++x) {
      bool full = true;
      for (int v = -1; v <= 1 && full; ++v) {
        for (int u = -1; u <= 1; ++u) full = full && roi(x + u, y + v) != 0;
      }
      if (!full) continue;
      const int c = img(x, y);
      // Clockwise from top-left.
      const int neighbours[8] = {img(x - 1, y - 1), img(x, y - 1), img(x + 1, y - 1), img(x + 1, y),
                                 img(x + 1, y + 1), img(x, y + 1), img(x - 1, y + 1), img(x - 1, y)};
      int code = 0;
      for (int k = 0; k < 8; ++k) code += (neighbours[k] >= c ? 1 : 0) << k;
      hist[code] += 1.0;
      count += 1.0;
    }
  }
  if (count == 0.0) throw RoiError("lbp_histogram: ROI is empty after 1-pixel erosion");
  for (auto& v : hist) v /= count;
  return hist;
}

std::vector<FeatureVector> extract_batch(std::span<const FrameRef> frames, const SchemeSet& scheme,
                                         const FeatureConfig& config) {
  std::vector<FeatureVector> out;
  out.reserve(frames.size());
  for (const auto& f : frames) {
    out.push_back(extract_with(
        *f.image, *f.roi, scheme, config,
        [](const GrayImage& i, const BinaryMask& r, int b) { return reference::laws_histogram(i, r, b); },
        [](const GrayImage& i, const BinaryMask& r) { return reference::lbp_histogram(i, r); }));
  }
  return out;
}

}  // namespace reference

}  // namespace bsedepth::features
