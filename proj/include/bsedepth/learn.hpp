#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "bsedepth/core.hpp"
#include "bsedepth/features.hpp"

namespace bsedepth::learn {

struct SampleMeta {
  CupSize cup = CupSize::A;
  Quadrant quadrant = Quadrant::LeftQ2;
  std::string clip_id;
  std::size_t frame_index = 0;
};

struct LabeledSample {
  features::FeatureVector features;
  PressureLevel label = PressureLevel::Low;
  SampleMeta meta;
};

struct Dataset {
  std::vector<LabeledSample> train;
  std::vector<LabeledSample> test;
  features::SchemeSet scheme;

  /// Shared dimension and scheme, finite values, train/test disjoint by
  /// (clip, frame). Throws StructuralError.
  void validate() const;
  std::size_t dimension() const;
};

enum class ModelKind : std::uint8_t { REG = 0, SVM = 1, GBT = 2, ANN = 3 };
inline constexpr ModelKind kAllModelKinds[] = {ModelKind::REG, ModelKind::SVM, ModelKind::GBT,
                                               ModelKind::ANN};
std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view text);

/// Per-dimension z-score parameters, fit on the training split only.
struct Standardization {
  std::vector<double> mean;
  std::vector<double> stddev;

  std::vector<double> apply(std::span<const double> x) const;
  std::size_t dimension() const { return mean.size(); }
};

/// Population mean/std per dimension; zero-variance dimensions get std 1.
Standardization standardize_fit(std::span<const LabeledSample> train);
Standardization standardize_fit(std::span<const std::vector<double>> rows);

/// Dense row-major design matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data).subspan(r * cols, cols);
  }
};

Matrix design_matrix(std::span<const LabeledSample> samples, const Standardization& z);
std::vector<int> label_indices(std::span<const LabeledSample> samples);

// ---------------------------------------------------------------------------
// Configurations. Defaults are the benchmark's fixed settings.

struct RegConfig {
  double ridge = 1e-3;
};

struct SvmConfig {
  double c = 1.0;            // weight on the mean hinge loss
  double lambda = 1e-2;      // L2 weight
  int epochs = 200;
  double learning_rate = 1.0;
};

struct GbtConfig {
  int max_depth = 3;
  int rounds = 100;
  double shrinkage = 0.1;
  int min_samples_leaf = 1;
};

struct AnnConfig {
  int hidden = 32;
  int epochs = 500;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
};

struct TrainConfig {
  RegConfig reg;
  SvmConfig svm;
  GbtConfig gbt;
  AnnConfig ann;
};

// ---------------------------------------------------------------------------
// Model parameters.

struct RegParams {
  std::vector<double> weights;
  double bias = 0.0;
};

struct SvmParams {
  std::array<std::vector<double>, kNumPressureLevels> weights;
  std::array<double, kNumPressureLevels> bias{};
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  double predict(std::span<const double> x) const;
};

struct GbtParams {
  std::array<double, kNumPressureLevels> base_score{};
  double shrinkage = 0.1;
  std::vector<std::array<RegressionTree, kNumPressureLevels>> rounds;
};

/// One tanh hidden layer, softmax output. Matrices are row-major:
/// w1 is hidden x input, w2 is classes x hidden.
struct AnnParams {
  std::size_t inputs = 0;
  std::size_t hidden = 0;
  std::vector<double> w1, b1, w2, b2;

  std::vector<double> flatten() const;
  static AnnParams unflatten(std::size_t inputs, std::size_t hidden, std::span<const double> flat);
};

struct TrainedModel {
  ModelKind kind = ModelKind::REG;
  Standardization standardization;
  std::variant<RegParams, SvmParams, GbtParams, AnnParams> params;

  std::size_t dimension() const { return standardization.dimension(); }
  PressureLevel predict(std::span<const double> features) const;
};

/// Thrown when a learner cannot train on the given data.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Training.

TrainedModel train_reg(const Dataset& data, const RegConfig& config = {});
TrainedModel train_svm(const Dataset& data, const SvmConfig& config = {});
TrainedModel train_gbt(const Dataset& data, const GbtConfig& config = {});
TrainedModel train_ann(const Dataset& data, const AnnConfig& config = {});
TrainedModel train(ModelKind kind, const Dataset& data, const TrainConfig& config);

/// Ridge least squares with an unpenalised bias: min ||Xw + b - y||^2 + ridge ||w||^2.
RegParams fit_ridge(const Matrix& x, std::span<const double> y, double ridge);
double reg_predict_value(const RegParams& p, std::span<const double> x);
PressureLevel reg_label(double value);

/// One-vs-rest linear SVMs, full-batch subgradient descent on
/// lambda/2 ||w||^2 + c * mean hinge. Throws TrainingError for one class.
SvmParams fit_svm(const Matrix& x, std::span<const int> labels, const SvmConfig& config);
std::array<double, kNumPressureLevels> svm_decision(const SvmParams& p, std::span<const double> x);

/// Argmax with ties going to the higher class index.
int argmax_high(std::span<const double> values);

/// Multiclass softmax gradient boosting. When `loss_trace` is non-null it
/// receives the training log-loss before the first round and after each round.
GbtParams fit_gbt(const Matrix& x, std::span<const int> labels, const GbtConfig& config,
                  std::vector<double>* loss_trace = nullptr);
std::array<double, kNumPressureLevels> gbt_scores(const GbtParams& p, std::span<const double> x);
std::array<double, kNumPressureLevels> softmax(std::span<const double> logits);
double mean_log_loss(const GbtParams& p, const Matrix& x, std::span<const int> labels);

AnnParams ann_init(std::size_t inputs, std::size_t hidden, std::uint64_t seed);
/// Mean softmax cross-entropy over the batch and its gradient in flatten() order.
double ann_loss_and_gradient(const AnnParams& p, const Matrix& x, std::span<const int> labels,
                             std::vector<double>* gradient);
std::array<double, kNumPressureLevels> ann_probabilities(const AnnParams& p,
                                                         std::span<const double> x);
/// Full-batch gradient descent; `loss_trace` gets the loss at the start of each epoch.
AnnParams fit_ann(const Matrix& x, std::span<const int> labels, const AnnConfig& config,
                  std::vector<double>* loss_trace = nullptr);

// ---------------------------------------------------------------------------
// Evaluation.

struct EvalReport {
  double accuracy = 0.0;
  std::array<std::array<std::size_t, kNumPressureLevels>, kNumPressureLevels> confusion{};
  std::size_t n = 0;
};

EvalReport evaluate(const TrainedModel& model, std::span<const LabeledSample> samples);
EvalReport evaluate_predictions(std::span<const PressureLevel> truth,
                                std::span<const PressureLevel> predicted);

/// Mean accuracy of a uniform random 3-way guesser over `repeats` seeded draws.
double chance_accuracy(std::span<const LabeledSample> samples, std::uint64_t seed, int repeats = 1000);

// ---------------------------------------------------------------------------
// Benchmark.

struct BenchmarkRow {
  std::string scheme;
  std::string model;
  double train_acc = 0.0;
  double test_acc = 0.0;
  double gap() const { return train_acc - test_acc; }
};

struct BenchmarkTable {
  std::uint64_t seed = 0;
  std::vector<BenchmarkRow> rows;  // last row is the chance baseline

  std::string to_csv() const;
  nlohmann::json to_json() const;
  static BenchmarkTable from_json(const nlohmann::json& j);
  /// Fixed-width text table for terminals.
  std::string to_text() const;
};

inline constexpr std::string_view kBaselineScheme = "Baseline";
inline constexpr std::string_view kBaselineModel = "Chance";

/// Trains and scores every (dataset, kind) cell; cells run in parallel,
/// results are ordered by dataset then kind, followed by the baseline row.
BenchmarkTable benchmark(std::span<const Dataset> datasets, std::span<const ModelKind> kinds,
                         std::uint64_t seed, const TrainConfig& config = {});

// ---------------------------------------------------------------------------
// Persistence.

nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);

}  // namespace bsedepth::learn
