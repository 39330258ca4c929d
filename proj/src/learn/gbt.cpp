#include <algorithm>
#include <cmath>
#include <numeric>

#include "bsedepth/learn.hpp"

namespace bsedepth::learn {

double RegressionTree::predict(std::span<const double> x) const {
  int i = 0;
  while (nodes[i].feature >= 0) {
    i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
  }
  return nodes[i].value;
}

namespace {

constexpr double kProbFloor = 1e-15;

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

// Level-wise least-squares tree on residuals. Leaf values are the
// one-step Newton estimate for the multiclass softmax loss. Writes each
// sample's leaf into `leaf_of`.
RegressionTree fit_tree(const Matrix& x, const std::vector<std::vector<std::uint32_t>>& order,
                        std::span<const double> residual, const GbtConfig& config,
                        std::vector<int>& leaf_of) {
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;
  const int min_leaf = std::max(1, config.min_samples_leaf);

  RegressionTree tree;
  tree.nodes.push_back(TreeNode{});
  std::fill(leaf_of.begin(), leaf_of.end(), 0);

  std::vector<int> frontier = {0};
  for (int depth = 0; depth < config.max_depth && !frontier.empty(); ++depth) {
    const std::size_t nodes_now = tree.nodes.size();
    std::vector<double> sum(nodes_now, 0.0);
    std::vector<std::size_t> count(nodes_now, 0);
    std::vector<char> open(nodes_now, 0);
    for (int q : frontier) open[q] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      sum[leaf_of[i]] += residual[i];
      ++count[leaf_of[i]];
    }

    std::vector<SplitCandidate> best(nodes_now);
    std::vector<double> left_sum(nodes_now);
    std::vector<std::size_t> left_count(nodes_now);
    std::vector<double> last(nodes_now);
    for (std::size_t f = 0; f < d; ++f) {
      std::fill(left_sum.begin(), left_sum.end(), 0.0);
      std::fill(left_count.begin(), left_count.end(), 0);
      for (std::uint32_t i : order[f]) {
        const int q = leaf_of[i];
        if (!open[q]) continue;
        const double v = x(i, f);
        const std::size_t nl = left_count[q];
        const std::size_t nr = count[q] - nl;
        if (nl >= static_cast<std::size_t>(min_leaf) && nr >= static_cast<std::size_t>(min_leaf) &&
            v > last[q]) {
          const double sl = left_sum[q];
          const double sr = sum[q] - sl;
          const double gain = sl * sl / static_cast<double>(nl) + sr * sr / static_cast<double>(nr) -
                              sum[q] * sum[q] / static_cast<double>(count[q]);
          if (gain > best[q].gain) {
            double thr = 0.5 * (last[q] + v);
            if (!(thr < v)) thr = last[q];
            best[q] = SplitCandidate{gain, static_cast<int>(f), thr};
          }
        }
        left_sum[q] += residual[i];
        ++left_count[q];
        last[q] = v;
      }
    }

    std::vector<int> next;
    for (int q : frontier) {
      if (best[q].feature < 0 || !(best[q].gain > 1e-12)) continue;
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back(TreeNode{});
      tree.nodes.push_back(TreeNode{});
      tree.nodes[q].feature = best[q].feature;
      tree.nodes[q].threshold = best[q].threshold;
      tree.nodes[q].left = left;
      tree.nodes[q].right = left + 1;
      next.push_back(left);
      next.push_back(left + 1);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const TreeNode& node = tree.nodes[leaf_of[i]];
      if (node.feature >= 0) {
        leaf_of[i] = x(i, node.feature) <= node.threshold ? node.left : node.right;
      }
    }
    frontier = std::move(next);
  }

  // Leaf values: (K-1)/K * sum(r) / sum(|r| (1 - |r|)).
  std::vector<double> num(tree.nodes.size(), 0.0), den(tree.nodes.size(), 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = residual[i];
    num[leaf_of[i]] += r;
    den[leaf_of[i]] += std::abs(r) * (1.0 - std::abs(r));
  }
  constexpr double k_factor = (kNumPressureLevels - 1.0) / kNumPressureLevels;
  for (std::size_t q = 0; q < tree.nodes.size(); ++q) {
    if (tree.nodes[q].feature >= 0) continue;
    tree.nodes[q].value = den[q] > 1e-12 ? k_factor * num[q] / den[q] : 0.0;
  }
  return tree;
}

double log_loss_from_scores(const std::vector<std::array<double, kNumPressureLevels>>& scores,
                            std::span<const int> labels) {
  double loss = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto p = softmax(scores[i]);
    loss -= std::log(std::max(p[labels[i]], kProbFloor));
  }
  return loss / static_cast<double>(scores.size());
}

}  // namespace

GbtParams fit_gbt(const Matrix& x, std::span<const int> labels, const GbtConfig& config,
                  std::vector<double>* loss_trace) {
  if (x.rows == 0) throw TrainingError("train_gbt: empty training split");
  if (labels.size() != x.rows) throw StructuralError("train_gbt: label count mismatch");
  const std::size_t n = x.rows;
  const std::size_t d = x.cols;

  GbtParams params;
  params.shrinkage = config.shrinkage;
  std::array<double, kNumPressureLevels> counts{};
  for (int l : labels) counts[l] += 1.0;
  for (int k = 0; k < kNumPressureLevels; ++k) {
    params.base_score[k] = std::log(std::max(counts[k] / static_cast<double>(n), kProbFloor));
  }

  std::vector<std::vector<std::uint32_t>> order(d, std::vector<std::uint32_t>(n));
  for (std::size_t f = 0; f < d; ++f) {
    std::iota(order[f].begin(), order[f].end(), 0U);
    std::stable_sort(order[f].begin(), order[f].end(),
                     [&](std::uint32_t a, std::uint32_t b) { return x(a, f) < x(b, f); });
  }

  std::vector<std::array<double, kNumPressureLevels>> scores(n, params.base_score);
  if (loss_trace) loss_trace->push_back(log_loss_from_scores(scores, labels));

  std::vector<double> residual(n);
  std::vector<int> leaf_of(n);
  for (int round = 0; round < config.rounds; ++round) {
    std::vector<std::array<double, kNumPressureLevels>> prob(n);
    for (std::size_t i = 0; i < n; ++i) prob[i] = softmax(scores[i]);

    std::array<RegressionTree, kNumPressureLevels> trees;
    for (int k = 0; k < kNumPressureLevels; ++k) {
      for (std::size_t i = 0; i < n; ++i) residual[i] = (labels[i] == k ? 1.0 : 0.0) - prob[i][k];
      trees[k] = fit_tree(x, order, residual, config, leaf_of);
      for (std::size_t i = 0; i < n; ++i) {
        scores[i][k] += config.shrinkage * trees[k].nodes[leaf_of[i]].value;
      }
    }
    params.rounds.push_back(std::move(trees));
    if (loss_trace) loss_trace->push_back(log_loss_from_scores(scores, labels));
  }
  return params;
}

std::array<double, kNumPressureLevels> gbt_scores(const GbtParams& p, std::span<const double> x) {
  auto s = p.base_score;
  for (const auto& round : p.rounds) {
    for (int k = 0; k < kNumPressureLevels; ++k) s[k] += p.shrinkage * round[k].predict(x);
  }
  return s;
}

double mean_log_loss(const GbtParams& p, const Matrix& x, std::span<const int> labels) {
  std::vector<std::array<double, kNumPressureLevels>> scores(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) scores[i] = gbt_scores(p, x.row(i));
  return log_loss_from_scores(scores, labels);
}

}  // namespace bsedepth::learn
