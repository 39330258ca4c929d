#include "bsedepth/pipeline.hpp"

#include <cstdio>
#include <map>
#include <sstream>

namespace bsedepth::pipeline {

using nlohmann::json;

std::string_view to_string(roi::Reducer reducer) {
  switch (reducer) {
    case roi::Reducer::Median: return "median";
    case roi::Reducer::Mean: return "mean";
    case roi::Reducer::Min: return "min";
  }
  return "?";
}

std::optional<roi::Reducer> parse_reducer(std::string_view text) {
  for (auto r : {roi::Reducer::Median, roi::Reducer::Mean, roi::Reducer::Min}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

LabelSet compute_labels(std::span<const dataio::Clip> clips, roi::Reducer reducer) {
  LabelSet out;
  out.reducer = reducer;

  std::vector<std::vector<std::optional<roi::RoiDepth>>> scalars(clips.size());
  for (std::size_t c = 0; c < clips.size(); ++c) {
    const auto& frames = clips[c].frames;
    scalars[c].resize(frames.size());
    const auto n = static_cast<std::ptrdiff_t>(frames.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t f = 0; f < n; ++f) {
      const Frame& frame = frames[f];
      scalars[c][f] = roi::extract_scalar_depth(frame.depth, roi::intersect_masks(frame.masks), reducer);
    }
  }

  std::map<std::pair<CupSize, Quadrant>, std::vector<double>> per_cell;
  for (std::size_t c = 0; c < clips.size(); ++c) {
    auto& bucket = per_cell[{clips[c].cup, clips[c].quadrant}];
    for (const auto& s : scalars[c]) {
      if (s) bucket.push_back(s->value_mm);
    }
  }

  std::map<std::pair<CupSize, Quadrant>, std::size_t> cell_index;
  for (const auto& [key, values] : per_cell) {
    roi::DepthStats stats;
    try {
      stats = roi::clip_depth_stats(std::span<const double>(values));
    } catch (const roi::DegenerateClipError& e) {
      throw roi::DegenerateClipError("cup " + std::string(bsedepth::to_string(key.first)) + " " +
                                     std::string(bsedepth::to_string(key.second)) + ": " + e.what());
    }
    const auto t = pressure::thresholds(stats);
    cell_index[key] = out.cells.size();
    out.cells.push_back(CellLabels{key.first, key.second, stats, t, pressure::crisp_boundaries(t), 0});
  }

  for (std::size_t c = 0; c < clips.size(); ++c) {
    auto& cell = out.cells[cell_index.at({clips[c].cup, clips[c].quadrant})];
    for (std::size_t f = 0; f < scalars[c].size(); ++f) {
      FrameLabel fl{clips[c].id, f, std::nullopt, 0, std::nullopt};
      if (const auto& s = scalars[c][f]) {
        fl.scalar_mm = s->value_mm;
        fl.valid_pixels = s->valid_pixel_count;
        fl.label = pressure::crisp_label(s->value_mm, cell.thresholds);
        ++cell.labeled_frames;
      }
      out.frames.push_back(std::move(fl));
    }
  }
  return out;
}

std::optional<PressureLevel> LabelSet::find(const std::string& clip_id, std::size_t frame) const {
  for (const auto& f : frames) {
    if (f.clip_id == clip_id && f.frame_index == frame) return f.label;
  }
  return std::nullopt;
}

json LabelSet::to_json() const {
  json j;
  j["format_version"] = "1";
  j["reducer"] = std::string(to_string(reducer));
  j["cells"] = json::array();
  for (const auto& c : cells) {
    j["cells"].push_back({{"cup", std::string(bsedepth::to_string(c.cup))},
                          {"quadrant", std::string(bsedepth::to_string(c.quadrant))},
                          {"min_mm", c.stats.min_mm},
                          {"max_mm", c.stats.max_mm},
                          {"a1", c.thresholds.a1},
                          {"a2", c.thresholds.a2},
                          {"a3", c.thresholds.a3},
                          {"low_medium_mm", c.boundaries.low_medium},
                          {"medium_high_mm", c.boundaries.medium_high},
                          {"labeled_frames", c.labeled_frames}});
  }
  j["frames"] = json::array();
  for (const auto& f : frames) {
    j["frames"].push_back({{"clip", f.clip_id},
                           {"frame", f.frame_index},
                           {"scalar_mm", f.scalar_mm ? json(*f.scalar_mm) : json(nullptr)},
                           {"valid_pixels", f.valid_pixels},
                           {"label", f.label ? json(std::string(bsedepth::to_string(*f.label))) : json(nullptr)}});
  }
  return j;
}

LabelSet LabelSet::from_json(const json& j) {
  if (j.value("format_version", "") != "1") throw dataio::DatasetError("labels: unknown format_version");
  LabelSet out;
  const auto reducer = parse_reducer(j.at("reducer").get<std::string>());
  if (!reducer) throw dataio::DatasetError("labels: unknown reducer");
  out.reducer = *reducer;
  for (const auto& c : j.at("cells")) {
    const auto cup = parse_cup(c.at("cup").get<std::string>());
    const auto quadrant = parse_quadrant(c.at("quadrant").get<std::string>());
    if (!cup || !quadrant) throw dataio::DatasetError("labels: unknown cup/quadrant");
    const roi::DepthStats stats{c.at("min_mm").get<double>(), c.at("max_mm").get<double>()};
    const auto t = pressure::thresholds(stats);
    out.cells.push_back(CellLabels{*cup, *quadrant, stats, t, pressure::crisp_boundaries(t),
                                   c.at("labeled_frames").get<std::size_t>()});
  }
  for (const auto& f : j.at("frames")) {
    FrameLabel fl{f.at("clip").get<std::string>(), f.at("frame").get<std::size_t>(), std::nullopt,
                  f.at("valid_pixels").get<std::size_t>(), std::nullopt};
    if (!f.at("scalar_mm").is_null()) fl.scalar_mm = f.at("scalar_mm").get<double>();
    if (!f.at("label").is_null()) {
      fl.label = parse_pressure_level(f.at("label").get<std::string>());
      if (!fl.label) throw dataio::DatasetError("labels: unknown label for " + fl.clip_id);
    }
    out.frames.push_back(std::move(fl));
  }
  return out;
}

std::string depth_range_table(const LabelSet& labels) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-6s %-9s %-17s %-17s %-17s\n", "Size", "Frame", "LOW", "MEDIUM", "HIGH");
  os << line;
  for (const auto& c : labels.cells) {
    char low[32], med[32], high[32];
    std::snprintf(low, sizeof low, "%.1f - %.1f", c.stats.min_mm, c.boundaries.low_medium);
    std::snprintf(med, sizeof med, "%.1f - %.1f", c.boundaries.low_medium, c.boundaries.medium_high);
    std::snprintf(high, sizeof high, "%.1f - %.1f", c.boundaries.medium_high, c.stats.max_mm);
    std::snprintf(line, sizeof line, "Cup %-2s %-9s %-17s %-17s %-17s\n",
                  std::string(bsedepth::to_string(c.cup)).c_str(),
                  std::string(bsedepth::to_string(c.quadrant)).c_str(), low, med, high);
    os << line;
  }
  return os.str();
}

std::vector<learn::Dataset> build_datasets(std::span<const dataio::Clip> clips, const LabelSet& labels,
                                           std::span<const features::SchemeSet> schemes,
                                           const features::FeatureConfig& config) {
  std::map<std::pair<std::string, std::size_t>, PressureLevel> label_of;
  for (const auto& f : labels.frames) {
    if (f.label) label_of[{f.clip_id, f.frame_index}] = *f.label;
  }

  struct Item {
    const dataio::Clip* clip;
    std::size_t frame;
    PressureLevel label;
  };
  std::vector<Item> items;
  std::vector<features::FrameRef> refs;
  for (const auto& clip : clips) {
    for (std::size_t f = 0; f < clip.frames.size(); ++f) {
      const auto it = label_of.find({clip.id, f});
      if (it == label_of.end()) continue;  // no reading: skipped, never imputed
      items.push_back(Item{&clip, f, it->second});
      refs.push_back(features::FrameRef{&clip.frames[f].gray, &clip.frames[f].masks.box});
    }
  }

  std::map<features::Scheme, std::vector<features::FeatureVector>> single;
  for (const auto& set : schemes) {
    for (auto s : set.schemes()) {
      if (!single.count(s)) single[s] = features::extract_batch(refs, features::SchemeSet::single(s), config);
    }
  }

  std::vector<learn::Dataset> out;
  for (const auto& set : schemes) {
    learn::Dataset data{{}, {}, set};
    for (std::size_t i = 0; i < items.size(); ++i) {
      features::FeatureVector fv{{}, set};
      for (auto s : set.schemes()) {
        const auto& v = single.at(s)[i].values;
        fv.values.insert(fv.values.end(), v.begin(), v.end());
      }
      learn::LabeledSample sample{std::move(fv), items[i].label,
                                  learn::SampleMeta{items[i].clip->cup, items[i].clip->quadrant,
                                                    items[i].clip->id, items[i].frame}};
      (items[i].clip->split == synth::Split::Train ? data.train : data.test).push_back(std::move(sample));
    }
    data.validate();
    out.push_back(std::move(data));
  }
  return out;
}

}  // namespace bsedepth::pipeline
