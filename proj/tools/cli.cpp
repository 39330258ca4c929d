#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "bsedepth/dataio.hpp"
#include "bsedepth/features.hpp"
#include "bsedepth/learn.hpp"
#include "bsedepth/pipeline.hpp"
#include "bsedepth/synth.hpp"

namespace bsedepth::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::string out;
  std::string data;
  bool verbose = false;
  std::string config_file;

  // generate
  int frames = -1;  // negative: reference plan
  int frame_size = 128;
  double noise_sigma = 4.0;
  int cycles = 6;

  // label
  std::string reducer = "median";

  // features
  int shadow_threshold = 50;
  int laws_bins = 16;
  std::string lbp_variant = "basic";
  std::string schemes = "all";

  // learning
  std::string models = "all";
  std::string model = "svm";
  std::string scheme = "lawlbp";
  std::string model_file;
  std::string report;
};

// Stopwatch that only reports when --verbose is set; timings go to stderr so
// stdout stays byte-reproducible.
class Timer {
 public:
  Timer(const RunConfig& cfg, std::ostream& err, std::string what)
      : on_(cfg.verbose), err_(err), what_(std::move(what)), start_(std::chrono::steady_clock::now()) {}
  ~Timer() {
    if (!on_) return;
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    err_ << "[" << what_ << "] " << s << " s\n";
  }

 private:
  bool on_;
  std::ostream& err_;
  std::string what_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<features::SchemeSet> parse_schemes(const std::string& text, bool default_singles_only = false) {
  if (text == "all") {
    if (default_singles_only) {
      std::vector<features::SchemeSet> out;
      for (auto s : features::kAllSchemes) out.push_back(features::SchemeSet::single(s));
      return out;
    }
    return features::SchemeSet::singles_and_pairs();
  }
  std::vector<features::SchemeSet> out;
  for (const auto& item : split_list(text)) {
    const auto set = features::SchemeSet::parse(item);
    if (!set) throw UsageError("unknown scheme combination '" + item + "'");
    if (std::find(out.begin(), out.end(), *set) == out.end()) out.push_back(*set);
  }
  if (out.empty()) throw UsageError("no schemes selected");
  return out;
}

std::vector<learn::ModelKind> parse_models(const std::string& text) {
  if (text == "all") return {std::begin(learn::kAllModelKinds), std::end(learn::kAllModelKinds)};
  std::vector<learn::ModelKind> out;
  for (const auto& item : split_list(text)) {
    const auto kind = learn::parse_model_kind(item);
    if (!kind) throw UsageError("unknown model '" + item + "'");
    if (std::find(out.begin(), out.end(), *kind) == out.end()) out.push_back(*kind);
  }
  if (out.empty()) throw UsageError("no models selected");
  return out;
}

features::FeatureConfig feature_config(const RunConfig& cfg) {
  if (cfg.lbp_variant != "basic") throw UsageError("unsupported LBP variant '" + cfg.lbp_variant + "'");
  if (cfg.laws_bins < 1 || cfg.laws_bins > 256) throw UsageError("--laws-bins must be in [1, 256]");
  if (cfg.shadow_threshold < 0 || cfg.shadow_threshold > 256) {
    throw UsageError("--shadow-threshold must be in [0, 256]");
  }
  return features::FeatureConfig{cfg.shadow_threshold, cfg.laws_bins};
}

fs::path require_data(const RunConfig& cfg) {
  if (cfg.data.empty()) throw UsageError("--data is required");
  return cfg.data;
}

fs::path out_dir(const RunConfig& cfg) {
  const fs::path dir = cfg.out.empty() ? fs::path(cfg.data) : fs::path(cfg.out);
  if (dir.empty()) throw UsageError("--out is required");
  fs::create_directories(dir);
  return dir;
}

std::vector<dataio::Clip> load(const RunConfig& cfg, std::ostream& err) {
  Timer t(cfg, err, "load");
  return dataio::load_dataset(require_data(cfg) / "manifest.json");
}

pipeline::LabelSet load_labels(const RunConfig& cfg) {
  const fs::path path = require_data(cfg) / "labels.json";
  if (!fs::exists(path)) throw dataio::DatasetError(path.string() + " not found; run `label` first");
  return pipeline::LabelSet::from_json(json::parse(dataio::read_text(path)));
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ---------------------------------------------------------------------------

int cmd_generate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.out.empty()) throw UsageError("--out is required");
  std::vector<synth::PlanCell> plan = synth::default_plan();
  if (cfg.frames >= 0) {
    if (cfg.frames < 2) throw UsageError("--frames must be at least 2");
    for (auto& cell : plan) {
      cell.train_frames = cfg.frames;
      cell.test_frames = std::max(2, cfg.frames / 5);
    }
  }
  synth::CorpusOptions options{cfg.frame_size, cfg.noise_sigma, cfg.cycles};
  if (options.frame_size < 64) throw UsageError("--frame-size must be at least 64");
  if (options.palpation_cycles < 1) throw UsageError("--cycles must be positive");
  if (!(options.noise_sigma >= 0.0)) throw UsageError("--noise-sigma must be non-negative");

  std::vector<synth::CorpusClip> corpus;
  {
    Timer t(cfg, err, "generate");
    corpus = synth::generate_corpus(plan, cfg.seed, options);
  }
  {
    Timer t(cfg, err, "save");
    dataio::save_dataset(dataio::from_synthetic(corpus), cfg.out);
  }
  std::size_t total_train = 0, total_test = 0;
  out << "cell               train  test\n";
  for (const auto& cell : plan) {
    char line[96];
    std::snprintf(line, sizeof line, "Cup %s %-10s %6d %5d\n", std::string(to_string(cell.cup)).c_str(),
                  std::string(to_string(cell.quadrant)).c_str(), cell.train_frames, cell.test_frames);
    out << line;
    total_train += static_cast<std::size_t>(cell.train_frames);
    total_test += static_cast<std::size_t>(cell.test_frames);
  }
  out << "total              " << total_train << "   " << total_test << "\n";
  return 0;
}

int cmd_label(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto reducer = pipeline::parse_reducer(cfg.reducer);
  if (!reducer) throw UsageError("unknown reducer '" + cfg.reducer + "'");
  const auto clips = load(cfg, err);
  pipeline::LabelSet labels;
  {
    Timer t(cfg, err, "label");
    labels = pipeline::compute_labels(clips, *reducer);
  }
  dataio::write_text(out_dir(cfg) / "labels.json", dataio::dump_canonical(labels.to_json()));

  std::size_t skipped = 0;
  std::array<std::size_t, kNumPressureLevels> counts{};
  for (const auto& f : labels.frames) {
    if (f.label) {
      ++counts[to_index(*f.label)];
    } else {
      ++skipped;
    }
  }
  out << pipeline::depth_range_table(labels);
  out << "frames " << labels.frames.size() << " (Low " << counts[0] << ", Medium " << counts[1] << ", High "
      << counts[2] << ", no reading " << skipped << ")\n";
  return 0;
}

int cmd_extract(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto schemes = parse_schemes(cfg.schemes, true);
  const auto fcfg = feature_config(cfg);
  const auto clips = load(cfg, err);
  const auto labels = load_labels(cfg);
  std::vector<learn::Dataset> datasets;
  {
    Timer t(cfg, err, "extract");
    datasets = pipeline::build_datasets(clips, labels, schemes, fcfg);
  }
  const fs::path dir = out_dir(cfg);
  for (const auto& d : datasets) {
    std::string csv = "clip,frame,split,label";
    for (std::size_t j = 0; j < d.dimension(); ++j) csv += ",f" + std::to_string(j);
    csv += "\n";
    for (const auto* part : {&d.train, &d.test}) {
      const char* split = part == &d.train ? "train" : "test";
      for (const auto& s : *part) {
        csv += s.meta.clip_id + "," + std::to_string(s.meta.frame_index) + "," + split + "," +
               std::string(to_string(s.label));
        for (double v : s.features.values) csv += "," + fmt("%.17g", v);
        csv += "\n";
      }
    }
    const std::string name = "features_" + d.scheme.name() + ".csv";
    dataio::write_text(dir / name, csv);
    out << name << ": " << d.train.size() << " train, " << d.test.size() << " test, " << d.dimension()
        << " dims\n";
  }
  return 0;
}

learn::TrainConfig train_config(const RunConfig& cfg) {
  learn::TrainConfig tc;
  tc.ann.seed = cfg.seed;
  return tc;
}

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto schemes = parse_schemes(cfg.scheme);
  if (schemes.size() != 1) throw UsageError("train takes exactly one --scheme");
  const auto kinds = parse_models(cfg.model);
  if (kinds.size() != 1) throw UsageError("train takes exactly one --model");
  const auto fcfg = feature_config(cfg);
  const auto clips = load(cfg, err);
  const auto labels = load_labels(cfg);
  const auto datasets = pipeline::build_datasets(clips, labels, schemes, fcfg);
  const auto& data = datasets.front();

  learn::TrainedModel model;
  {
    Timer t(cfg, err, "train");
    model = learn::train(kinds.front(), data, train_config(cfg));
  }
  json j = learn::model_to_json(model);
  j["scheme"] = data.scheme.name();
  j["feature_config"] = {{"shadow_threshold", fcfg.shadow_threshold}, {"laws_bins", fcfg.laws_bins},
                         {"lbp_variant", cfg.lbp_variant}};
  const fs::path path = cfg.model_file.empty()
                            ? out_dir(cfg) / ("model_" + data.scheme.name() + "_" +
                                              std::string(learn::to_string(model.kind)) + ".json")
                            : fs::path(cfg.model_file);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  dataio::write_text(path, dataio::dump_canonical(j));
  const auto report = learn::evaluate(model, data.train);
  out << "trained " << learn::to_string(model.kind) << " on " << data.scheme.name() << " ("
      << data.train.size() << " samples, " << data.dimension() << " dims), train accuracy "
      << fmt("%.4f", report.accuracy) << "\n"
      << "wrote " << path.filename().string() << "\n";
  return 0;
}

void print_confusion(std::ostream& out, const learn::EvalReport& r) {
  out << "confusion (rows truth, cols predicted: Low Medium High)\n";
  for (int t = 0; t < kNumPressureLevels; ++t) {
    char line[96];
    std::snprintf(line, sizeof line, "  %-6s %6zu %6zu %6zu\n", std::string(to_string(level_from_index(t))).c_str(),
                  r.confusion[t][0], r.confusion[t][1], r.confusion[t][2]);
    out << line;
  }
}

json report_json(const learn::EvalReport& r) {
  json c = json::array();
  for (const auto& row : r.confusion) c.push_back(row);
  return {{"accuracy", r.accuracy}, {"n", r.n}, {"confusion", c}};
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.model_file.empty()) throw UsageError("--model-file is required");
  const json mj = json::parse(dataio::read_text(cfg.model_file));
  const auto model = learn::model_from_json(mj);
  const auto set = features::SchemeSet::parse(mj.at("scheme").get<std::string>());
  if (!set) throw dataio::DatasetError("model file has unknown scheme");
  RunConfig fc = cfg;
  if (mj.contains("feature_config")) {
    fc.shadow_threshold = mj["feature_config"].value("shadow_threshold", cfg.shadow_threshold);
    fc.laws_bins = mj["feature_config"].value("laws_bins", cfg.laws_bins);
    fc.lbp_variant = mj["feature_config"].value("lbp_variant", cfg.lbp_variant);
  }
  const auto clips = load(cfg, err);
  const auto labels = load_labels(cfg);
  const std::vector<features::SchemeSet> schemes{*set};
  const auto data = pipeline::build_datasets(clips, labels, schemes, feature_config(fc)).front();

  const auto train_report = learn::evaluate(model, data.train);
  const auto test_report = learn::evaluate(model, data.test);
  json j;
  j["format_version"] = "1";
  j["model"] = std::string(learn::to_string(model.kind));
  j["scheme"] = data.scheme.name();
  j["train"] = report_json(train_report);
  j["test"] = report_json(test_report);
  j["gap"] = train_report.accuracy - test_report.accuracy;
  dataio::write_text(out_dir(cfg) / "eval.json", dataio::dump_canonical(j));

  out << learn::to_string(model.kind) << " " << data.scheme.name() << ": train " << fmt("%.4f", train_report.accuracy)
      << ", test " << fmt("%.4f", test_report.accuracy) << " (n=" << test_report.n << "), gap "
      << fmt("%+.4f", train_report.accuracy - test_report.accuracy) << "\n";
  print_confusion(out, test_report);
  return 0;
}

int cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto schemes = parse_schemes(cfg.schemes);
  const auto kinds = parse_models(cfg.models);
  const auto fcfg = feature_config(cfg);
  const auto clips = load(cfg, err);
  const auto labels = load_labels(cfg);
  std::vector<learn::Dataset> datasets;
  {
    Timer t(cfg, err, "features");
    datasets = pipeline::build_datasets(clips, labels, schemes, fcfg);
  }
  learn::BenchmarkTable table;
  {
    Timer t(cfg, err, "benchmark");
    table = learn::benchmark(datasets, kinds, cfg.seed, train_config(cfg));
  }
  const fs::path dir = out_dir(cfg);
  dataio::write_text(dir / "report.csv", table.to_csv());
  dataio::write_text(dir / "report.json", dataio::dump_canonical(table.to_json()));
  out << table.to_text();
  return 0;
}

int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  fs::path path = cfg.report;
  if (path.empty()) {
    if (cfg.data.empty()) throw UsageError("--report or --data is required");
    path = fs::path(cfg.data) / "report.json";
  }
  const auto table = learn::BenchmarkTable::from_json(json::parse(dataio::read_text(path)));
  out << table.to_text();

  // Per-model best scheme by test accuracy, with its overfit gap.
  std::map<std::string, const learn::BenchmarkRow*> best;
  for (const auto& r : table.rows) {
    if (r.model == learn::kBaselineModel) continue;
    auto& b = best[r.model];
    if (!b || r.test_acc > b->test_acc) b = &r;
  }
  for (const auto& [model, row] : best) {
    out << "best " << model << ": " << row->scheme << " test " << fmt("%.4f", row->test_acc) << " gap "
        << fmt("%+.4f", row->gap()) << "\n";
  }
  if (!cfg.out.empty()) {
    fs::create_directories(cfg.out);
    dataio::write_text(fs::path(cfg.out) / "report.csv", table.to_csv());
  }
  return 0;
}

// Fills options the user did not pass on the command line from the JSON config.
void apply_config_file(CLI::App& app, const std::string& path) {
  const json j = json::parse(dataio::read_text(path));
  if (!j.is_object()) throw UsageError("config file must contain a JSON object");
  std::vector<CLI::App*> apps{&app};
  for (auto* sub : app.get_subcommands()) apps.push_back(sub);
  for (const auto& [key, value] : j.items()) {
    CLI::Option* opt = nullptr;
    for (auto* a : apps) {
      try {
        opt = a->get_option("--" + key);
        break;
      } catch (const CLI::OptionNotFound&) {
      }
    }
    if (!opt) {
      std::string dashed = key;
      std::replace(dashed.begin(), dashed.end(), '_', '-');
      for (auto* a : apps) {
        try {
          opt = a->get_option("--" + dashed);
          break;
        } catch (const CLI::OptionNotFound&) {
        }
      }
    }
    if (!opt) throw UsageError("config file key '" + key + "' is not a known option");
    if (opt->count() > 0) continue;
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_boolean()) {
      text = value.get<bool>() ? "true" : "false";
    } else {
      text = value.dump();
    }
    opt->clear();
    opt->add_result(text);
    opt->run_callback();
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Depth-pressure estimation for palpation video: synthetic data, labels, texture features, classifiers"};
  app.require_subcommand(1);
  app.add_option("--seed", cfg.seed, "Seed for generation and training");
  app.add_option("--out", cfg.out, "Output directory");
  app.add_option("--data", cfg.data, "Dataset directory containing manifest.json");
  app.add_flag("--verbose", cfg.verbose, "Print stage timings to stderr");
  app.add_option("--config", cfg.config_file, "JSON file mirroring the flags; flags take precedence");

  auto add_features = [&](CLI::App* sub) {
    sub->add_option("--shadow-threshold", cfg.shadow_threshold, "Shadow intensity threshold (0-255)");
    sub->add_option("--laws-bins", cfg.laws_bins, "Histogram bins per Laws energy map");
    sub->add_option("--lbp-variant", cfg.lbp_variant, "LBP variant tag (basic)");
  };

  auto* generate = app.add_subcommand("generate", "Write a synthetic corpus sized per the reference plan");
  generate->add_option("--frames", cfg.frames, "Frames per train clip for every cell (test gets frames/5)");
  generate->add_option("--frame-size", cfg.frame_size, "Frame edge length in pixels");
  generate->add_option("--noise-sigma", cfg.noise_sigma, "Gaussian intensity noise");
  generate->add_option("--cycles", cfg.cycles, "Press-release cycles per clip");

  auto* label = app.add_subcommand("label", "Compute depth envelopes, thresholds and per-frame labels");
  label->add_option("--reducer", cfg.reducer, "Scalar depth reducer: median, mean, min");

  auto* extract = app.add_subcommand("extract", "Write per-scheme feature tables");
  extract->add_option("--schemes", cfg.schemes, "Comma-separated schemes, e.g. law,lbp,lawlbp, or all");
  add_features(extract);

  auto* train = app.add_subcommand("train", "Train one model on the train split");
  train->add_option("--scheme", cfg.scheme, "Scheme combination, e.g. lawlbp");
  train->add_option("--model", cfg.model, "reg, svm, gbt or ann");
  train->add_option("--model-file", cfg.model_file, "Output model path");
  add_features(train);

  auto* eval = app.add_subcommand("eval", "Evaluate a trained model on the test split");
  eval->add_option("--model-file", cfg.model_file, "Model JSON written by train");

  auto* bench = app.add_subcommand("bench", "Benchmark schemes x models with a chance baseline");
  bench->add_option("--schemes", cfg.schemes, "Comma-separated schemes or all (4 singles + 6 pairs)");
  bench->add_option("--models", cfg.models, "Comma-separated models or all");
  add_features(bench);

  auto* report = app.add_subcommand("report", "Print a saved benchmark report");
  report->add_option("--report", cfg.report, "report.json path (default <data>/report.json)");

  for (auto* sub : {generate, label, extract, train, eval, bench, report}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (!cfg.config_file.empty()) apply_config_file(app, cfg.config_file);

    if (generate->parsed()) return cmd_generate(cfg, out, err);
    if (label->parsed()) return cmd_label(cfg, out, err);
    if (extract->parsed()) return cmd_extract(cfg, out, err);
    if (train->parsed()) return cmd_train(cfg, out, err);
    if (eval->parsed()) return cmd_eval(cfg, out, err);
    if (bench->parsed()) return cmd_bench(cfg, out, err);
    if (report->parsed()) return cmd_report(cfg, out, err);
    throw UsageError("no subcommand");
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    err << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "error: " << msg << "\n";
    return 1;
  }
}

}  // namespace bsedepth::cli
