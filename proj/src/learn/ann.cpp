#include <cmath>

#include <Eigen/Dense>

#include "bsedepth/learn.hpp"
#include "bsedepth/rng.hpp"

namespace bsedepth::learn {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMat>;
using RowMap = Eigen::Map<RowMat>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

constexpr auto K = static_cast<Eigen::Index>(kNumPressureLevels);

void check_shapes(const AnnParams& p) {
  if (p.w1.size() != p.hidden * p.inputs || p.b1.size() != p.hidden ||
      p.w2.size() != kNumPressureLevels * p.hidden || p.b2.size() != kNumPressureLevels) {
    throw StructuralError("ANN parameter shapes are inconsistent");
  }
}

}  // namespace

std::vector<double> AnnParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(w1.size() + b1.size() + w2.size() + b2.size());
  for (const auto* part : {&w1, &b1, &w2, &b2}) flat.insert(flat.end(), part->begin(), part->end());
  return flat;
}

AnnParams AnnParams::unflatten(std::size_t inputs, std::size_t hidden, std::span<const double> flat) {
  AnnParams p;
  p.inputs = inputs;
  p.hidden = hidden;
  const std::size_t sizes[4] = {hidden * inputs, hidden, kNumPressureLevels * hidden,
                                kNumPressureLevels};
  if (flat.size() != sizes[0] + sizes[1] + sizes[2] + sizes[3]) {
    throw StructuralError("ANN flat parameter length mismatch");
  }
  std::size_t offset = 0;
  for (auto [part, size] : {std::pair{&p.w1, sizes[0]}, std::pair{&p.b1, sizes[1]},
                            std::pair{&p.w2, sizes[2]}, std::pair{&p.b2, sizes[3]}}) {
    part->assign(flat.begin() + static_cast<std::ptrdiff_t>(offset),
                 flat.begin() + static_cast<std::ptrdiff_t>(offset + size));
    offset += size;
  }
  return p;
}

AnnParams ann_init(std::size_t inputs, std::size_t hidden, std::uint64_t seed) {
  AnnParams p;
  p.inputs = inputs;
  p.hidden = hidden;
  Rng rng(seed);
  // Glorot-uniform weights, zero biases.
  const double r1 = std::sqrt(6.0 / static_cast<double>(inputs + hidden));
  const double r2 = std::sqrt(6.0 / static_cast<double>(hidden + kNumPressureLevels));
  p.w1.resize(hidden * inputs);
  for (auto& v : p.w1) v = rng.uniform(-r1, r1);
  p.b1.assign(hidden, 0.0);
  p.w2.resize(kNumPressureLevels * hidden);
  for (auto& v : p.w2) v = rng.uniform(-r2, r2);
  p.b2.assign(kNumPressureLevels, 0.0);
  return p;
}

double ann_loss_and_gradient(const AnnParams& p, const Matrix& x, std::span<const int> labels,
                             std::vector<double>* gradient) {
  check_shapes(p);
  if (x.cols != p.inputs) throw StructuralError("ANN input dimension mismatch");
  if (labels.size() != x.rows || x.rows == 0) throw StructuralError("ANN batch/label mismatch");
  const auto n = static_cast<Eigen::Index>(x.rows);
  const auto d = static_cast<Eigen::Index>(p.inputs);
  const auto h = static_cast<Eigen::Index>(p.hidden);

  ConstRowMap X(x.data.data(), n, d);
  ConstRowMap W1(p.w1.data(), h, d);
  ConstVecMap B1(p.b1.data(), h);
  ConstRowMap W2(p.w2.data(), K, h);
  ConstVecMap B2(p.b2.data(), K);

  RowMat a = (X * W1.transpose()).rowwise() + B1.transpose();
  a = a.array().tanh();
  RowMat z2 = (a * W2.transpose()).rowwise() + B2.transpose();

  double loss = 0.0;
  RowMat delta2(n, K);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mx = z2.row(i).maxCoeff();
    Eigen::RowVectorXd e = (z2.row(i).array() - mx).exp();
    const double s = e.sum();
    e /= s;
    const int y = labels[static_cast<std::size_t>(i)];
    loss -= (z2(i, y) - mx) - std::log(s);
    delta2.row(i) = e;
    delta2(i, y) -= 1.0;
  }
  loss /= static_cast<double>(n);

  if (gradient) {
    delta2 /= static_cast<double>(n);
    gradient->assign(p.w1.size() + p.b1.size() + p.w2.size() + p.b2.size(), 0.0);
    double* g = gradient->data();
    RowMap gW1(g, h, d);
    Eigen::Map<Eigen::VectorXd> gB1(g + h * d, h);
    RowMap gW2(g + h * d + h, K, h);
    Eigen::Map<Eigen::VectorXd> gB2(g + h * d + h + K * h, K);

    gW2 = delta2.transpose() * a;
    gB2 = delta2.colwise().sum().transpose();
    RowMat delta1 = (delta2 * W2).array() * (1.0 - a.array().square());
    gW1 = delta1.transpose() * X;
    gB1 = delta1.colwise().sum().transpose();
  }
  return loss;
}

std::array<double, kNumPressureLevels> ann_probabilities(const AnnParams& p,
                                                         std::span<const double> x) {
  check_shapes(p);
  if (x.size() != p.inputs) throw StructuralError("ANN input dimension mismatch");
  std::array<double, kNumPressureLevels> logits{};
  std::vector<double> act(p.hidden);
  for (std::size_t j = 0; j < p.hidden; ++j) {
    double z = p.b1[j];
    for (std::size_t i = 0; i < p.inputs; ++i) z += p.w1[j * p.inputs + i] * x[i];
    act[j] = std::tanh(z);
  }
  for (int k = 0; k < kNumPressureLevels; ++k) {
    double z = p.b2[k];
    for (std::size_t j = 0; j < p.hidden; ++j) z += p.w2[k * p.hidden + j] * act[j];
    logits[k] = z;
  }
  return softmax(logits);
}

AnnParams fit_ann(const Matrix& x, std::span<const int> labels, const AnnConfig& config,
                  std::vector<double>* loss_trace) {
  if (x.rows == 0) throw TrainingError("train_ann: empty training split");
  if (config.hidden <= 0) throw TrainingError("train_ann: hidden units must be positive");
  AnnParams p = ann_init(x.cols, static_cast<std::size_t>(config.hidden), config.seed);
  std::vector<double> flat = p.flatten();
  std::vector<double> grad;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double loss = ann_loss_and_gradient(p, x, labels, &grad);
    if (loss_trace) loss_trace->push_back(loss);
    for (std::size_t i = 0; i < flat.size(); ++i) flat[i] -= config.learning_rate * grad[i];
    p = AnnParams::unflatten(p.inputs, p.hidden, flat);
  }
  return p;
}

}  // namespace bsedepth::learn
