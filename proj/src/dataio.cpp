#include "bsedepth/dataio.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "bsedepth/pgm.hpp"

namespace bsedepth::dataio {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json config_to_json(const synth::SynthConfig& c) {
  return {{"cup", std::string(to_string(c.cup))},
          {"quadrant", std::string(to_string(c.quadrant))},
          {"n_frames", c.n_frames},
          {"frame_size", c.frame_size},
          {"seed", c.seed},
          {"noise_sigma", c.noise_sigma},
          {"palpation_cycles", c.palpation_cycles}};
}

synth::SynthConfig config_from_json(const json& j) {
  synth::SynthConfig c;
  const auto cup = parse_cup(j.at("cup").get<std::string>());
  const auto quadrant = parse_quadrant(j.at("quadrant").get<std::string>());
  if (!cup || !quadrant) throw DatasetError("generator echo has unknown cup/quadrant");
  c.cup = *cup;
  c.quadrant = *quadrant;
  c.n_frames = j.at("n_frames").get<int>();
  c.frame_size = j.at("frame_size").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.noise_sigma = j.at("noise_sigma").get<double>();
  c.palpation_cycles = j.at("palpation_cycles").get<int>();
  return c;
}

std::string frame_name(std::size_t index) {
  std::ostringstream os;
  os << index << ".pgm";
  return os.str();
}

pgm::Image mask_image(const BinaryMask& m) {
  pgm::Image img{m.width(), m.height(), 255, {}};
  img.samples.reserve(m.size());
  for (auto v : m.pixels()) img.samples.push_back(v ? 255 : 0);
  return img;
}

void check_id(const std::string& id) {
  const bool ok = !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  }) && id != "." && id != "..";
  if (!ok) throw DatasetError("clip id '" + id + "' is not a safe directory name");
}

}  // namespace

Clip from_synthetic(const synth::CorpusClip& c) {
  return Clip{c.id,        c.config.cup,           c.config.quadrant, c.split,
              c.clip.frames, c.clip.truth_depths, c.config};
}

std::vector<Clip> from_synthetic(std::span<const synth::CorpusClip> corpus) {
  std::vector<Clip> out;
  out.reserve(corpus.size());
  for (const auto& c : corpus) out.push_back(from_synthetic(c));
  return out;
}

json Manifest::to_json() const {
  json j;
  j["format_version"] = format_version;
  j["clips"] = json::array();
  for (const auto& c : clips) {
    json e;
    e["id"] = c.id;
    e["cup"] = std::string(bsedepth::to_string(c.cup));
    e["quadrant"] = std::string(bsedepth::to_string(c.quadrant));
    e["split"] = std::string(synth::to_string(c.split));
    e["frame_count"] = c.frame_count;
    e["frames"] = json::array();
    for (const auto& f : c.frames) {
      e["frames"].push_back(
          {{"gray", f.gray}, {"depth", f.depth}, {"boxmask", f.boxmask}, {"fingermask", f.fingermask}});
    }
    if (!c.truth_depths.empty()) e["truth_depths_mm"] = c.truth_depths;
    if (c.generator) e["generator"] = config_to_json(*c.generator);
    j["clips"].push_back(std::move(e));
  }
  return j;
}

Manifest Manifest::from_json(const json& j) {
  Manifest m;
  if (!j.is_object() || !j.contains("format_version")) throw DatasetError("manifest: missing format_version");
  m.format_version = j.at("format_version").get<std::string>();
  if (m.format_version != kFormatVersion) {
    throw DatasetError("manifest: unknown format_version '" + m.format_version + "'");
  }
  std::set<std::string> ids;
  for (const auto& e : j.at("clips")) {
    ClipEntry c;
    c.id = e.at("id").get<std::string>();
    try {
      check_id(c.id);
      if (!ids.insert(c.id).second) throw DatasetError("duplicate clip id");
      const auto cup = parse_cup(e.at("cup").get<std::string>());
      const auto quadrant = parse_quadrant(e.at("quadrant").get<std::string>());
      const auto split = synth::parse_split(e.at("split").get<std::string>());
      if (!cup) throw DatasetError("unknown cup " + e.at("cup").dump());
      if (!quadrant) throw DatasetError("unknown quadrant " + e.at("quadrant").dump());
      if (!split) throw DatasetError("unknown split " + e.at("split").dump());
      c.cup = *cup;
      c.quadrant = *quadrant;
      c.split = *split;
      c.frame_count = e.at("frame_count").get<std::size_t>();
      for (const auto& f : e.at("frames")) {
        c.frames.push_back(FramePaths{f.at("gray").get<std::string>(), f.at("depth").get<std::string>(),
                                      f.at("boxmask").get<std::string>(),
                                      f.at("fingermask").get<std::string>()});
      }
      if (c.frames.size() != c.frame_count) {
        throw DatasetError("frame_count " + std::to_string(c.frame_count) + " but " +
                           std::to_string(c.frames.size()) + " frames listed");
      }
      if (e.contains("truth_depths_mm")) {
        c.truth_depths = e.at("truth_depths_mm").get<std::vector<double>>();
        if (c.truth_depths.size() != c.frame_count) throw DatasetError("truth_depths_mm length mismatch");
      }
      if (e.contains("generator")) c.generator = config_from_json(e.at("generator"));
    } catch (const DatasetError& err) {
      throw DatasetError("clip '" + c.id + "': " + err.what());
    } catch (const json::exception& err) {
      throw DatasetError("clip '" + c.id + "': " + err.what());
    }
    m.clips.push_back(std::move(c));
  }
  return m;
}

std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw DatasetError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

Manifest save_dataset(std::span<const Clip> clips, const fs::path& dir) {
  Manifest manifest;
  std::set<std::string> ids;
  try {
    fs::create_directories(dir);
  } catch (const fs::filesystem_error& e) {
    throw DatasetError("cannot create " + dir.string() + ": " + e.what());
  }
  for (const auto& clip : clips) {
    check_id(clip.id);
    if (!ids.insert(clip.id).second) throw DatasetError("duplicate clip id '" + clip.id + "'");
    ClipEntry entry{clip.id, clip.cup, clip.quadrant, clip.split, clip.frames.size(), {}, clip.truth_depths,
                    clip.generator};
    const fs::path base = fs::path("clips") / clip.id;
    for (const char* sub : {"gray", "depth", "boxmask", "fingermask"}) {
      try {
        fs::create_directories(dir / base / sub);
      } catch (const fs::filesystem_error& e) {
        throw DatasetError("cannot create " + (dir / base / sub).string() + ": " + e.what());
      }
    }
    for (std::size_t i = 0; i < clip.frames.size(); ++i) {
      const Frame& f = clip.frames[i];
      const std::string name = frame_name(i);
      FramePaths paths{(base / "gray" / name).generic_string(), (base / "depth" / name).generic_string(),
                       (base / "boxmask" / name).generic_string(),
                       (base / "fingermask" / name).generic_string()};
      try {
        pgm::write(dir / paths.gray,
                   pgm::Image{f.gray.width(), f.gray.height(), 255,
                              std::vector<std::uint16_t>(f.gray.pixels().begin(), f.gray.pixels().end())});
        pgm::write(dir / paths.depth,
                   pgm::Image{f.depth.width(), f.depth.height(), 65535,
                              std::vector<std::uint16_t>(f.depth.pixels().begin(), f.depth.pixels().end())});
        pgm::write(dir / paths.boxmask, mask_image(f.masks.box));
        pgm::write(dir / paths.fingermask, mask_image(f.masks.finger));
      } catch (const pgm::PgmError& e) {
        throw DatasetError("clip '" + clip.id + "' frame " + std::to_string(i) + ": " + e.what());
      }
      entry.frames.push_back(std::move(paths));
    }
    manifest.clips.push_back(std::move(entry));
  }
  write_text(dir / "manifest.json", dump_canonical(manifest.to_json()));
  return manifest;
}

namespace {

GrayImage as_gray(const pgm::Image& img) {
  if (img.maxval != 255) throw DatasetError("grayscale frame must have maxval 255, got " + std::to_string(img.maxval));
  return GrayImage(img.width, img.height, std::vector<std::uint8_t>(img.samples.begin(), img.samples.end()));
}

DepthFrame as_depth(const pgm::Image& img) {
  if (img.maxval != 65535) throw DatasetError("depth frame must have maxval 65535, got " + std::to_string(img.maxval));
  return DepthFrame(img.width, img.height, img.samples);
}

BinaryMask as_mask(const pgm::Image& img) {
  if (img.maxval != 255) throw DatasetError("mask must have maxval 255");
  std::vector<std::uint8_t> bits(img.samples.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (img.samples[i] != 0 && img.samples[i] != 255) {
      throw DatasetError("mask contains value " + std::to_string(img.samples[i]) + " (expected 0 or 255)");
    }
    bits[i] = img.samples[i] ? 1 : 0;
  }
  return BinaryMask(img.width, img.height, std::move(bits));
}

}  // namespace

std::vector<Clip> load_dataset(const fs::path& manifest_path) {
  json j;
  try {
    j = json::parse(read_text(manifest_path));
  } catch (const json::exception& e) {
    throw DatasetError(manifest_path.string() + ": " + e.what());
  }
  const Manifest manifest = Manifest::from_json(j);
  const fs::path dir = manifest_path.parent_path();

  std::vector<Clip> clips(manifest.clips.size());
  std::vector<std::string> errors(manifest.clips.size());
  const auto n = static_cast<std::ptrdiff_t>(manifest.clips.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < n; ++c) {
    const ClipEntry& e = manifest.clips[c];
    Clip clip{e.id, e.cup, e.quadrant, e.split, {}, e.truth_depths, e.generator};
    std::size_t i = 0;
    try {
      for (; i < e.frames.size(); ++i) {
        const FramePaths& p = e.frames[i];
        for (const auto* rel : {&p.gray, &p.depth, &p.boxmask, &p.fingermask}) {
          if (fs::path(*rel).is_absolute() || rel->find("..") != std::string::npos) {
            throw DatasetError("path '" + *rel + "' escapes the dataset directory");
          }
        }
        GrayImage gray = as_gray(pgm::read(dir / p.gray));
        DepthFrame depth = as_depth(pgm::read(dir / p.depth));
        BinaryMask box = as_mask(pgm::read(dir / p.boxmask));
        BinaryMask finger = as_mask(pgm::read(dir / p.fingermask));
        require_same_shape(gray, depth, "depth frame");
        require_same_shape(gray, box, "box mask");
        require_same_shape(gray, finger, "finger mask");
        clip.frames.push_back(Frame{std::move(gray), std::move(depth), MaskPair(std::move(box), std::move(finger))});
      }
      clips[c] = std::move(clip);
    } catch (const std::exception& err) {
      errors[c] = "clip '" + e.id + "' frame " + std::to_string(i) + ": " + err.what();
    }
  }
  for (const auto& err : errors) {
    if (!err.empty()) throw DatasetError(err);
  }
  return clips;
}

std::map<std::pair<CupSize, Quadrant>, CellSplit> split_view(std::span<const Clip> clips) {
  std::vector<std::size_t> order(clips.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return clips[a].id < clips[b].id; });

  std::map<std::pair<CupSize, Quadrant>, CellSplit> cells;
  for (std::size_t c : order) {
    const Clip& clip = clips[c];
    auto& cell = cells[{clip.cup, clip.quadrant}];
    auto& bucket = clip.split == synth::Split::Train ? cell.train : cell.test;
    for (std::size_t f = 0; f < clip.frames.size(); ++f) bucket.push_back(FrameKey{c, f});
  }
  return cells;
}

}  // namespace bsedepth::dataio
