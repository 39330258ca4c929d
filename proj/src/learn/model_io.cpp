#include "bsedepth/learn.hpp"

namespace bsedepth::learn {

using nlohmann::json;

namespace {

json tree_to_json(const RegressionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    if (n.feature < 0) {
      nodes.push_back({{"value", n.value}});
    } else {
      nodes.push_back(
          {{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
    }
  }
  return nodes;
}

RegressionTree tree_from_json(const json& j) {
  RegressionTree tree;
  for (const auto& n : j) {
    TreeNode node;
    if (n.contains("feature")) {
      node.feature = n.at("feature").get<int>();
      node.threshold = n.at("threshold").get<double>();
      node.left = n.at("left").get<int>();
      node.right = n.at("right").get<int>();
    } else {
      node.value = n.at("value").get<double>();
    }
    tree.nodes.push_back(node);
  }
  const int count = static_cast<int>(tree.nodes.size());
  if (count == 0) throw StructuralError("model: empty regression tree");
  for (int i = 0; i < count; ++i) {
    const auto& node = tree.nodes[i];
    if (node.feature >= 0 && (node.left <= i || node.right <= i || node.left >= count || node.right >= count)) {
      throw StructuralError("model: malformed regression tree at node " + std::to_string(i));
    }
  }
  return tree;
}

}  // namespace

json model_to_json(const TrainedModel& model) {
  json j;
  j["format_version"] = "1";
  j["kind"] = std::string(to_string(model.kind));
  j["standardization"] = {{"mean", model.standardization.mean},
                          {"std", model.standardization.stddev}};
  json p;
  switch (model.kind) {
    case ModelKind::REG: {
      const auto& r = std::get<RegParams>(model.params);
      p = {{"weights", r.weights}, {"bias", r.bias}};
      break;
    }
    case ModelKind::SVM: {
      const auto& s = std::get<SvmParams>(model.params);
      p = {{"weights", s.weights}, {"bias", s.bias}};
      break;
    }
    case ModelKind::GBT: {
      const auto& g = std::get<GbtParams>(model.params);
      p["base_score"] = g.base_score;
      p["shrinkage"] = g.shrinkage;
      p["rounds"] = json::array();
      for (const auto& round : g.rounds) {
        json trees = json::array();
        for (const auto& t : round) trees.push_back(tree_to_json(t));
        p["rounds"].push_back(trees);
      }
      break;
    }
    case ModelKind::ANN: {
      const auto& a = std::get<AnnParams>(model.params);
      p = {{"inputs", a.inputs}, {"hidden", a.hidden}, {"w1", a.w1},
           {"b1", a.b1},         {"w2", a.w2},         {"b2", a.b2}};
      break;
    }
  }
  j["params"] = p;
  return j;
}

TrainedModel model_from_json(const json& j) {
  if (j.value("format_version", "") != "1") throw StructuralError("model: unknown format_version");
  const auto kind = parse_model_kind(j.at("kind").get<std::string>());
  if (!kind) throw StructuralError("model: unknown kind " + j.at("kind").dump());
  TrainedModel m;
  m.kind = *kind;
  m.standardization.mean = j.at("standardization").at("mean").get<std::vector<double>>();
  m.standardization.stddev = j.at("standardization").at("std").get<std::vector<double>>();
  const std::size_t d = m.standardization.mean.size();
  if (m.standardization.stddev.size() != d) throw StructuralError("model: standardization length mismatch");
  for (double s : m.standardization.stddev) {
    if (!(s > 0.0)) throw StructuralError("model: non-positive standard deviation");
  }

  const json& p = j.at("params");
  switch (m.kind) {
    case ModelKind::REG: {
      RegParams r{p.at("weights").get<std::vector<double>>(), p.at("bias").get<double>()};
      if (r.weights.size() != d) throw StructuralError("model: REG weight length mismatch");
      m.params = std::move(r);
      break;
    }
    case ModelKind::SVM: {
      SvmParams s;
      s.weights = p.at("weights").get<std::array<std::vector<double>, kNumPressureLevels>>();
      s.bias = p.at("bias").get<std::array<double, kNumPressureLevels>>();
      for (const auto& w : s.weights) {
        if (w.size() != d) throw StructuralError("model: SVM weight length mismatch");
      }
      m.params = std::move(s);
      break;
    }
    case ModelKind::GBT: {
      GbtParams g;
      g.base_score = p.at("base_score").get<std::array<double, kNumPressureLevels>>();
      g.shrinkage = p.at("shrinkage").get<double>();
      for (const auto& round : p.at("rounds")) {
        if (round.size() != kNumPressureLevels) throw StructuralError("model: GBT round arity");
        std::array<RegressionTree, kNumPressureLevels> trees;
        for (int k = 0; k < kNumPressureLevels; ++k) {
          trees[k] = tree_from_json(round.at(k));
          for (const auto& node : trees[k].nodes) {
            if (node.feature >= static_cast<int>(d)) throw StructuralError("model: GBT feature index out of range");
          }
        }
        g.rounds.push_back(std::move(trees));
      }
      m.params = std::move(g);
      break;
    }
    case ModelKind::ANN: {
      AnnParams a;
      a.inputs = p.at("inputs").get<std::size_t>();
      a.hidden = p.at("hidden").get<std::size_t>();
      a.w1 = p.at("w1").get<std::vector<double>>();
      a.b1 = p.at("b1").get<std::vector<double>>();
      a.w2 = p.at("w2").get<std::vector<double>>();
      a.b2 = p.at("b2").get<std::vector<double>>();
      if (a.inputs != d) throw StructuralError("model: ANN input dimension mismatch");
      // Validates the remaining shapes.
      (void)AnnParams::unflatten(a.inputs, a.hidden, a.flatten());
      m.params = std::move(a);
      break;
    }
  }
  return m;
}

}  // namespace bsedepth::learn
