#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "bsedepth/learn.hpp"

namespace bsedepth::learn {

RegParams fit_ridge(const Matrix& x, std::span<const double> y, double ridge) {
  if (x.rows == 0) throw TrainingError("fit_ridge: no samples");
  if (y.size() != x.rows) throw StructuralError("fit_ridge: target count mismatch");
  const auto d = static_cast<Eigen::Index>(x.cols);
  const auto n = static_cast<Eigen::Index>(x.rows);
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> X(
      x.data.data(), n, d);
  Eigen::Map<const Eigen::VectorXd> Y(y.data(), n);

  // Normal equations with the bias as an extra, unpenalised column of ones.
  Eigen::MatrixXd a(d + 1, d + 1);
  a.topLeftCorner(d, d) = X.transpose() * X;
  a.topLeftCorner(d, d).diagonal().array() += ridge;
  const Eigen::VectorXd colsum = X.colwise().sum().transpose();
  a.topRightCorner(d, 1) = colsum;
  a.bottomLeftCorner(1, d) = colsum.transpose();
  a(d, d) = static_cast<double>(n);
  Eigen::VectorXd rhs(d + 1);
  rhs.head(d) = X.transpose() * Y;
  rhs(d) = Y.sum();

  const Eigen::VectorXd sol = a.ldlt().solve(rhs);
  RegParams p;
  p.weights.assign(sol.data(), sol.data() + d);
  p.bias = sol(d);
  return p;
}

double reg_predict_value(const RegParams& p, std::span<const double> x) {
  double v = p.bias;
  for (std::size_t j = 0; j < x.size(); ++j) v += p.weights[j] * x[j];
  return v;
}

PressureLevel reg_label(double value) {
  if (!std::isfinite(value)) return PressureLevel::Medium;
  // Half-way values round up, toward the higher pressure.
  const double r = std::floor(value + 0.5);
  return level_from_index(static_cast<int>(std::clamp(r, 0.0, 2.0)));
}

SvmParams fit_svm(const Matrix& x, std::span<const int> labels, const SvmConfig& config) {
  if (x.rows == 0) throw TrainingError("train_svm: empty training split");
  if (labels.size() != x.rows) throw StructuralError("train_svm: label count mismatch");
  const bool single_class =
      std::all_of(labels.begin(), labels.end(), [&](int l) { return l == labels.front(); });
  if (single_class) {
    throw TrainingError("train_svm: training split contains only class " +
                        std::string(to_string(level_from_index(labels.front()))) +
                        "; use a constant predictor instead");
  }

  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  const double scale = config.c / static_cast<double>(n);
  const int average_from = config.epochs / 2;

  SvmParams out;
  for (int k = 0; k < kNumPressureLevels; ++k) {
    std::vector<double> w(d, 0.0), grad(d), w_avg(d, 0.0);
    double b = 0.0, b_avg = 0.0;
    int averaged = 0;
    for (int t = 0; t < config.epochs; ++t) {
      std::fill(grad.begin(), grad.end(), 0.0);
      double grad_b = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = x.row(i);
        const double yi = labels[i] == k ? 1.0 : -1.0;
        double f = b;
        for (std::size_t j = 0; j < d; ++j) f += w[j] * row[j];
        if (yi * f < 1.0) {
          for (std::size_t j = 0; j < d; ++j) grad[j] -= yi * row[j];
          grad_b -= yi;
        }
      }
      const double eta = config.learning_rate / (1.0 + config.lambda * config.learning_rate * t);
      for (std::size_t j = 0; j < d; ++j) w[j] -= eta * (config.lambda * w[j] + scale * grad[j]);
      b -= eta * scale * grad_b;
      if (t >= average_from) {
        for (std::size_t j = 0; j < d; ++j) w_avg[j] += w[j];
        b_avg += b;
        ++averaged;
      }
    }
    if (averaged > 0) {
      for (auto& v : w_avg) v /= averaged;
      b_avg /= averaged;
    } else {
      w_avg = w;
      b_avg = b;
    }
    out.weights[k] = std::move(w_avg);
    out.bias[k] = b_avg;
  }
  return out;
}

std::array<double, kNumPressureLevels> svm_decision(const SvmParams& p, std::span<const double> x) {
  std::array<double, kNumPressureLevels> out{};
  for (int k = 0; k < kNumPressureLevels; ++k) {
    double f = p.bias[k];
    for (std::size_t j = 0; j < x.size(); ++j) f += p.weights[k][j] * x[j];
    out[k] = f;
  }
  return out;
}

}  // namespace bsedepth::learn
