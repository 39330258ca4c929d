#include "bsedepth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "bsedepth/rng.hpp"

namespace bsedepth::synth {

namespace {

struct EnvelopeRow {
  CupSize cup;
  Quadrant quadrant;
  double min_mm;
  double max_mm;
};

constexpr EnvelopeRow kEnvelopes[] = {
    {CupSize::A, Quadrant::LeftQ2, 762, 794},  {CupSize::A, Quadrant::LeftQ3, 744, 771},
    {CupSize::A, Quadrant::RightQ2, 772, 790}, {CupSize::A, Quadrant::RightQ3, 771, 801},
    {CupSize::B, Quadrant::LeftQ2, 607, 678},  {CupSize::B, Quadrant::LeftQ3, 603, 617},
    {CupSize::B, Quadrant::RightQ2, 619, 684}, {CupSize::B, Quadrant::RightQ3, 614, 658},
    {CupSize::C, Quadrant::LeftQ2, 568, 609},  {CupSize::C, Quadrant::LeftQ3, 563, 607},
    {CupSize::C, Quadrant::RightQ2, 591, 668}, {CupSize::C, Quadrant::RightQ3, 597, 673},
};

constexpr PlanCell kDefaultPlan[] = {
    {CupSize::A, Quadrant::LeftQ2, 101, 18},  {CupSize::A, Quadrant::LeftQ3, 120, 21},
    {CupSize::A, Quadrant::RightQ2, 105, 18}, {CupSize::A, Quadrant::RightQ3, 99, 18},
    {CupSize::B, Quadrant::LeftQ2, 142, 25},  {CupSize::B, Quadrant::LeftQ3, 113, 19},
    {CupSize::B, Quadrant::RightQ2, 120, 21}, {CupSize::B, Quadrant::RightQ3, 108, 19},
    {CupSize::C, Quadrant::LeftQ2, 61, 11},   {CupSize::C, Quadrant::LeftQ3, 85, 15},
    {CupSize::C, Quadrant::RightQ2, 75, 13},  {CupSize::C, Quadrant::RightQ3, 81, 14},
};

// Generator constants. Geometry is expressed as fractions of the frame size.
constexpr double kBackgroundOffsetMm = 60.0;
constexpr double kDomeRadius = 0.45;
constexpr double kFingerRadius = 0.08;
constexpr double kFingerWobble = 0.025;
constexpr double kJitterFraction = 0.03;
constexpr double kHoleFraction = 0.01;
constexpr double kMmPerPixel = 2.0;
constexpr double kShadowDarkness = 0.18;
constexpr double kShadowBasePx = 3.0;
constexpr double kShadowGrowthPx = 14.0;
constexpr double kShadowFeatherPx = 3.0;
constexpr double kTextureAmplitude = 12.0;
constexpr int kTextureCell = 8;
constexpr double kBackgroundIntensity = 30.0;
constexpr double kSkinIntensity = 185.0;

std::uint8_t to_u8(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

// Smooth value noise in [-1, 1]: random lattice values with bilinear interpolation.
std::vector<double> value_noise(int size, Rng& rng) {
  const int cells = size / kTextureCell + 2;
  std::vector<double> lattice(static_cast<std::size_t>(cells) * cells);
  for (auto& v : lattice) v = rng.uniform(-1.0, 1.0);
  std::vector<double> out(static_cast<std::size_t>(size) * size);
  for (int y = 0; y < size; ++y) {
    const double fy = static_cast<double>(y) / kTextureCell;
    const int iy = static_cast<int>(fy);
    const double ty = fy - iy;
    for (int x = 0; x < size; ++x) {
      const double fx = static_cast<double>(x) / kTextureCell;
      const int ix = static_cast<int>(fx);
      const double tx = fx - ix;
      auto at = [&](int gx, int gy) { return lattice[static_cast<std::size_t>(gy) * cells + gx]; };
      const double top = at(ix, iy) * (1 - tx) + at(ix + 1, iy) * tx;
      const double bottom = at(ix, iy + 1) * (1 - tx) + at(ix + 1, iy + 1) * tx;
      out[static_cast<std::size_t>(y) * size + x] = top * (1 - ty) + bottom * ty;
    }
  }
  return out;
}

struct BoxRect {
  int x0, y0, x1, y1;
};

BoxRect quadrant_box(Quadrant q, int size) {
  const int c = size / 2;
  const int side = size / 2 - 8;
  const bool left = q == Quadrant::LeftQ2 || q == Quadrant::LeftQ3;
  const bool upper = q == Quadrant::LeftQ2 || q == Quadrant::RightQ2;
  const int x0 = left ? c - side - 2 : c + 2;
  const int y0 = upper ? c - side - 2 : c + 2;
  return {x0, y0, x0 + side, y0 + side};
}

Frame render_frame(const SynthConfig& cfg, const roi::DepthStats& env, double truth_mm,
                   std::uint64_t frame_seed) {
  Rng rng(frame_seed);
  const int size = cfg.frame_size;
  const double cx = size / 2.0;
  const double cy = size / 2.0;
  const double dome_r = kDomeRadius * size;
  const double protrusion = dome_protrusion_mm(cfg.cup);
  const double background = env.max_mm + kBackgroundOffsetMm;
  const double indentation = (truth_mm - env.min_mm) / (env.max_mm - env.min_mm);

  const BoxRect box = quadrant_box(cfg.quadrant, size);
  const double finger_r = kFingerRadius * size;
  const double wobble = kFingerWobble * size;
  const double fx = 0.5 * (box.x0 + box.x1) + rng.uniform(-wobble, wobble);
  const double fy = 0.5 * (box.y0 + box.y1) + rng.uniform(-wobble, wobble);
  const double shadow_outer = finger_r + kShadowBasePx + kShadowGrowthPx * indentation;

  const auto texture = value_noise(size, rng);
  const double lx = -0.3, ly = -0.4, lz = 1.0;
  const double lnorm = std::sqrt(lx * lx + ly * ly + lz * lz);

  const std::size_t n = static_cast<std::size_t>(size) * size;
  std::vector<std::uint8_t> gray(n), box_mask(n, 0), finger_mask(n, 0);
  std::vector<std::uint16_t> depth(n);
  const auto finger_depth = static_cast<std::uint16_t>(std::lround(truth_mm));

  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * size + x;
      const double px = x + 0.5, py = y + 0.5;
      const double dx = px - cx, dy = py - cy;
      const double rr = std::sqrt(dx * dx + dy * dy) / dome_r;
      const double fdist = std::hypot(px - fx, py - fy);
      const bool in_finger = fdist <= finger_r;
      const bool in_box = x >= box.x0 && x < box.x1 && y >= box.y0 && y < box.y1;
      box_mask[i] = in_box ? 1 : 0;
      finger_mask[i] = in_finger ? 1 : 0;

      double surface_mm = background;
      double shade = kBackgroundIntensity;
      if (rr < 1.0) {
        const double h = std::sqrt(1.0 - rr * rr);
        surface_mm = background - protrusion * h;
        // Surface slope per pixel from the analytic dome, then Lambert shading.
        const double dz_dr = protrusion * rr / std::max(h, 1e-3) / (dome_r * kMmPerPixel);
        const double r_px = std::max(rr * dome_r, 1e-9);
        const double gx = dz_dr * dx / r_px, gy = dz_dr * dy / r_px;
        const double nnorm = std::sqrt(gx * gx + gy * gy + 1.0);
        const double lambert = std::max(0.0, (gx * lx + gy * ly + lz) / (nnorm * lnorm));
        shade = 40.0 + 170.0 * lambert;
      }

      double intensity = in_finger ? kSkinIntensity : shade;
      intensity += kTextureAmplitude * texture[i] + cfg.noise_sigma * rng.normal();
      if (!in_finger && rr < 1.0 && fdist <= shadow_outer) {
        // Deeper presses cast a wider dark annulus; its outer rim is feathered.
        const double t = std::clamp((fdist - (shadow_outer - kShadowFeatherPx)) / kShadowFeatherPx, 0.0, 1.0);
        intensity *= kShadowDarkness + (1.0 - kShadowDarkness) * t;
      }
      gray[i] = to_u8(intensity);

      if (in_finger) {
        depth[i] = finger_depth;
      } else {
        const double noisy = surface_mm + rng.uniform(-1.5, 1.5);
        depth[i] = static_cast<std::uint16_t>(std::clamp(std::lround(noisy), 1L, 65535L));
      }
    }
  }

  // Sensor holes inside the palpation ROI.
  std::vector<std::size_t> roi_pixels;
  for (std::size_t i = 0; i < n; ++i) {
    if (box_mask[i] && finger_mask[i]) roi_pixels.push_back(i);
  }
  const auto holes = static_cast<std::size_t>(std::floor(kHoleFraction * roi_pixels.size() + 0.5));
  for (std::size_t h = 0; h < holes && !roi_pixels.empty(); ++h) {
    const std::size_t pick = rng.below(roi_pixels.size() - h);
    std::swap(roi_pixels[pick], roi_pixels[roi_pixels.size() - 1 - h]);
    depth[roi_pixels[roi_pixels.size() - 1 - h]] = 0;
  }

  return Frame{GrayImage(size, size, std::move(gray)), DepthFrame(size, size, std::move(depth)),
               MaskPair(BinaryMask(size, size, std::move(box_mask)),
                        BinaryMask(size, size, std::move(finger_mask)))};
}

}  // namespace

roi::DepthStats depth_envelope(CupSize cup, Quadrant quadrant) {
  for (const auto& row : kEnvelopes) {
    if (row.cup == cup && row.quadrant == quadrant) return {row.min_mm, row.max_mm};
  }
  throw std::invalid_argument("no depth envelope for this cup/quadrant");
}

double dome_protrusion_mm(CupSize cup) {
  switch (cup) {
    case CupSize::A: return 25.0;
    case CupSize::B: return 45.0;
    case CupSize::C: return 65.0;
  }
  return 0.0;
}

void SynthConfig::validate() const {
  if (n_frames < 2) throw std::invalid_argument("n_frames must be at least 2, got " + std::to_string(n_frames));
  if (frame_size < 64) throw std::invalid_argument("frame_size must be at least 64, got " + std::to_string(frame_size));
  if (palpation_cycles < 1) throw std::invalid_argument("palpation_cycles must be positive");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise_sigma must be non-negative");
}

int effective_cycles(int configured_cycles, int n_frames) {
  return std::max(1, std::min(configured_cycles, n_frames / 12));
}

SynthClip generate_clip(const SynthConfig& config) {
  config.validate();
  const roi::DepthStats env = depth_envelope(config.cup, config.quadrant);
  const double range = env.max_mm - env.min_mm;
  const int n = config.n_frames;
  const int cycles = effective_cycles(config.palpation_cycles, n);

  Rng rng(config.seed);
  Rng jitter_rng = rng.split();
  const std::uint64_t frame_base = rng.next_u64();

  SynthClip clip;
  clip.truth_depths.resize(static_cast<std::size_t>(n));
  std::vector<double> wave(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    wave[t] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * cycles * t / n));
    const double jitter = jitter_rng.uniform(-kJitterFraction, kJitterFraction) * range;
    clip.truth_depths[t] = std::clamp(env.min_mm + range * wave[t] + jitter, env.min_mm, env.max_mm);
  }
  // Pin both ends of the envelope so the clip's MIN/MAX equal the reference envelope.
  clip.truth_depths.front() = env.min_mm;
  const auto peak = std::max_element(wave.begin(), wave.end()) - wave.begin();
  clip.truth_depths[static_cast<std::size_t>(peak)] = env.max_mm;
  clip.stats = env;

  clip.frames.resize(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (int t = 0; t < n; ++t) {
    Rng seeder(frame_base + static_cast<std::uint64_t>(t));
    clip.frames[t] = render_frame(config, env, clip.truth_depths[t], seeder.next_u64());
  }
  return clip;
}

PressureLevel intended_label(double truth_mm, const roi::DepthStats& envelope) {
  return pressure::crisp_label(truth_mm, pressure::thresholds(envelope));
}

std::string_view to_string(Split split) { return split == Split::Train ? "train" : "test"; }

std::optional<Split> parse_split(std::string_view text) {
  if (text == "train") return Split::Train;
  if (text == "test") return Split::Test;
  return std::nullopt;
}

std::vector<PlanCell> default_plan() { return {std::begin(kDefaultPlan), std::end(kDefaultPlan)}; }

std::string clip_id(CupSize cup, Quadrant quadrant, Split split) {
  return "cup" + std::string(bsedepth::to_string(cup)) + "_" + std::string(bsedepth::to_string(quadrant)) +
         "_" + std::string(to_string(split));
}

std::vector<CorpusClip> generate_corpus(const std::vector<PlanCell>& plan, std::uint64_t seed,
                                        const CorpusOptions& options) {
  std::vector<CorpusClip> out;
  for (const auto& cell : plan) {
    for (Split split : {Split::Train, Split::Test}) {
      const int frames = split == Split::Train ? cell.train_frames : cell.test_frames;
      if (frames == 0) continue;
      const std::uint64_t key = static_cast<std::uint64_t>(cell.cup) * 16 +
                                static_cast<std::uint64_t>(cell.quadrant) * 2 +
                                static_cast<std::uint64_t>(split);
      Rng keyed(seed ^ (0x9e3779b97f4a7c15ULL * (key + 1)));
      SynthConfig cfg;
      cfg.cup = cell.cup;
      cfg.quadrant = cell.quadrant;
      cfg.n_frames = frames;
      cfg.frame_size = options.frame_size;
      cfg.noise_sigma = options.noise_sigma;
      cfg.palpation_cycles = options.palpation_cycles;
      cfg.seed = keyed.next_u64();
      out.push_back(CorpusClip{clip_id(cell.cup, cell.quadrant, split), split, cfg, generate_clip(cfg)});
    }
  }
  return out;
}

}  // namespace bsedepth::synth
