#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include "bsedepth/learn.hpp"
#include "bsedepth/rng.hpp"

namespace bsedepth::learn {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::REG: return "REG";
    case ModelKind::SVM: return "SVM";
    case ModelKind::GBT: return "GBT";
    case ModelKind::ANN: return "ANN";
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view text) {
  std::string upper(text);
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (auto k : kAllModelKinds) {
    if (to_string(k) == upper) return k;
  }
  return std::nullopt;
}

std::size_t Dataset::dimension() const {
  if (!train.empty()) return train.front().features.values.size();
  if (!test.empty()) return test.front().features.values.size();
  return 0;
}

void Dataset::validate() const {
  const std::size_t dim = dimension();
  std::set<std::pair<std::string, std::size_t>> train_keys;
  auto check = [&](const LabeledSample& s, const char* split) {
    if (s.features.values.size() != dim) {
      throw StructuralError(std::string(split) + " sample " + s.meta.clip_id + "#" +
                            std::to_string(s.meta.frame_index) + " has dimension " +
                            std::to_string(s.features.values.size()) + ", expected " +
                            std::to_string(dim));
    }
    if (!(s.features.scheme == scheme)) {
      throw StructuralError(std::string(split) + " sample " + s.meta.clip_id + " uses scheme " +
                            s.features.scheme.name() + ", dataset is " + scheme.name());
    }
    for (double v : s.features.values) {
      if (!std::isfinite(v)) {
        throw StructuralError(std::string(split) + " sample " + s.meta.clip_id + "#" +
                              std::to_string(s.meta.frame_index) + " has non-finite features");
      }
    }
  };
  for (const auto& s : train) {
    check(s, "train");
    train_keys.emplace(s.meta.clip_id, s.meta.frame_index);
  }
  for (const auto& s : test) {
    check(s, "test");
    if (train_keys.count({s.meta.clip_id, s.meta.frame_index})) {
      throw StructuralError("frame " + s.meta.clip_id + "#" + std::to_string(s.meta.frame_index) +
                            " appears in both train and test");
    }
  }
}

std::vector<double> Standardization::apply(std::span<const double> x) const {
  if (x.size() != mean.size()) {
    throw StructuralError("feature dimension " + std::to_string(x.size()) +
                          " does not match model dimension " + std::to_string(mean.size()));
  }
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / stddev[j];
  return out;
}

Standardization standardize_fit(std::span<const std::vector<double>> rows) {
  if (rows.empty()) throw TrainingError("standardize_fit: empty training set");
  const std::size_t d = rows.front().size();
  const double n = static_cast<double>(rows.size());
  Standardization z{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) z.mean[j] += r[j];
  }
  for (auto& m : z.mean) m /= n;
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) {
      const double c = r[j] - z.mean[j];
      z.stddev[j] += c * c;
    }
  }
  for (auto& s : z.stddev) {
    s = std::sqrt(s / n);
    // Zero-variance dimensions pass through centred.
    if (!(s > 1e-12)) s = 1.0;
  }
  return z;
}

Standardization standardize_fit(std::span<const LabeledSample> train) {
  std::vector<std::vector<double>> rows;
  rows.reserve(train.size());
  for (const auto& s : train) rows.push_back(s.features.values);
  return standardize_fit(std::span<const std::vector<double>>(rows));
}

Matrix design_matrix(std::span<const LabeledSample> samples, const Standardization& z) {
  Matrix m(samples.size(), z.dimension());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto row = z.apply(samples[i].features.values);
    std::copy(row.begin(), row.end(), m.data.begin() + static_cast<std::ptrdiff_t>(i * m.cols));
  }
  return m;
}

std::vector<int> label_indices(std::span<const LabeledSample> samples) {
  std::vector<int> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = to_index(samples[i].label);
  return out;
}

int argmax_high(std::span<const double> values) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(values.size()); ++k) {
    if (values[k] >= values[best]) best = k;
  }
  return best;
}

std::array<double, kNumPressureLevels> softmax(std::span<const double> logits) {
  std::array<double, kNumPressureLevels> p{};
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (int k = 0; k < kNumPressureLevels; ++k) {
    p[k] = std::exp(logits[k] - mx);
    sum += p[k];
  }
  for (auto& v : p) v /= sum;
  return p;
}

PressureLevel TrainedModel::predict(std::span<const double> features) const {
  const auto x = standardization.apply(features);
  switch (kind) {
    case ModelKind::REG:
      return reg_label(reg_predict_value(std::get<RegParams>(params), x));
    case ModelKind::SVM:
      return level_from_index(argmax_high(svm_decision(std::get<SvmParams>(params), x)));
    case ModelKind::GBT:
      return level_from_index(argmax_high(gbt_scores(std::get<GbtParams>(params), x)));
    case ModelKind::ANN:
      return level_from_index(argmax_high(ann_probabilities(std::get<AnnParams>(params), x)));
  }
  throw std::logic_error("unknown model kind");
}

namespace {

struct Prepared {
  Standardization z;
  Matrix x;
  std::vector<int> y;
};

Prepared prepare(const Dataset& data) {
  if (data.train.empty()) throw TrainingError("training split is empty");
  data.validate();
  Prepared p;
  p.z = standardize_fit(std::span<const LabeledSample>(data.train));
  p.x = design_matrix(data.train, p.z);
  p.y = label_indices(data.train);
  return p;
}

}  // namespace

TrainedModel train_reg(const Dataset& data, const RegConfig& config) {
  auto p = prepare(data);
  std::vector<double> target(p.y.begin(), p.y.end());
  return TrainedModel{ModelKind::REG, std::move(p.z), fit_ridge(p.x, target, config.ridge)};
}

TrainedModel train_svm(const Dataset& data, const SvmConfig& config) {
  auto p = prepare(data);
  return TrainedModel{ModelKind::SVM, std::move(p.z), fit_svm(p.x, p.y, config)};
}

TrainedModel train_gbt(const Dataset& data, const GbtConfig& config) {
  auto p = prepare(data);
  return TrainedModel{ModelKind::GBT, std::move(p.z), fit_gbt(p.x, p.y, config)};
}

TrainedModel train_ann(const Dataset& data, const AnnConfig& config) {
  auto p = prepare(data);
  return TrainedModel{ModelKind::ANN, std::move(p.z), fit_ann(p.x, p.y, config)};
}

TrainedModel train(ModelKind kind, const Dataset& data, const TrainConfig& config) {
  switch (kind) {
    case ModelKind::REG: return train_reg(data, config.reg);
    case ModelKind::SVM: return train_svm(data, config.svm);
    case ModelKind::GBT: return train_gbt(data, config.gbt);
    case ModelKind::ANN: return train_ann(data, config.ann);
  }
  throw std::logic_error("unknown model kind");
}

EvalReport evaluate_predictions(std::span<const PressureLevel> truth,
                                std::span<const PressureLevel> predicted) {
  if (truth.size() != predicted.size()) {
    throw StructuralError("evaluate: " + std::to_string(truth.size()) + " labels vs " +
                          std::to_string(predicted.size()) + " predictions");
  }
  EvalReport r;
  r.n = truth.size();
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++r.confusion[to_index(truth[i])][to_index(predicted[i])];
    if (truth[i] == predicted[i]) ++correct;
  }
  r.accuracy = r.n == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(r.n);
  return r;
}

EvalReport evaluate(const TrainedModel& model, std::span<const LabeledSample> samples) {
  std::vector<PressureLevel> truth, predicted;
  truth.reserve(samples.size());
  predicted.reserve(samples.size());
  for (const auto& s : samples) {
    if (s.features.values.size() != model.dimension()) {
      throw StructuralError("evaluate: sample " + s.meta.clip_id + "#" +
                            std::to_string(s.meta.frame_index) + " has dimension " +
                            std::to_string(s.features.values.size()) + ", model expects " +
                            std::to_string(model.dimension()));
    }
    truth.push_back(s.label);
    predicted.push_back(model.predict(s.features.values));
  }
  return evaluate_predictions(truth, predicted);
}

double chance_accuracy(std::span<const LabeledSample> samples, std::uint64_t seed, int repeats) {
  if (samples.empty() || repeats <= 0) return 0.0;
  Rng rng(seed);
  std::size_t correct = 0;
  for (int r = 0; r < repeats; ++r) {
    for (const auto& s : samples) {
      if (static_cast<int>(rng.below(kNumPressureLevels)) == to_index(s.label)) ++correct;
    }
  }
  return static_cast<double>(correct) / (static_cast<double>(samples.size()) * repeats);
}

}  // namespace bsedepth::learn
