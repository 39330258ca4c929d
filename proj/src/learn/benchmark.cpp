#include <cstdio>
#include <sstream>

#include "bsedepth/learn.hpp"
#include "bsedepth/rng.hpp"

namespace bsedepth::learn {

namespace {

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

BenchmarkTable benchmark(std::span<const Dataset> datasets, std::span<const ModelKind> kinds,
                         std::uint64_t seed, const TrainConfig& config) {
  BenchmarkTable table;
  table.seed = seed;
  const std::size_t cells = datasets.size() * kinds.size();
  std::vector<BenchmarkRow> rows(cells);
  std::vector<std::string> errors(cells);

  // Every cell gets its own ANN init seed so results do not depend on scheduling.
  std::vector<TrainConfig> cell_config(cells, config);
  Rng seeder(seed);
  for (auto& c : cell_config) c.ann.seed = seeder.next_u64();

  const auto n = static_cast<std::ptrdiff_t>(cells);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t c = 0; c < n; ++c) {
    const Dataset& data = datasets[static_cast<std::size_t>(c) / kinds.size()];
    const ModelKind kind = kinds[static_cast<std::size_t>(c) % kinds.size()];
    try {
      const TrainedModel model = train(kind, data, cell_config[c]);
      rows[c] = BenchmarkRow{data.scheme.name(), std::string(to_string(kind)),
                             evaluate(model, data.train).accuracy,
                             evaluate(model, data.test).accuracy};
    } catch (const std::exception& e) {
      errors[c] = data.scheme.name() + "/" + std::string(to_string(kind)) + ": " + e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw TrainingError("benchmark cell " + e);
  }
  table.rows = std::move(rows);

  BenchmarkRow baseline{std::string(kBaselineScheme), std::string(kBaselineModel), 0.0, 0.0};
  if (!datasets.empty()) {
    Rng rng(seed ^ 0x5bd1e995ULL);
    baseline.train_acc = chance_accuracy(datasets.front().train, rng.next_u64());
    baseline.test_acc = chance_accuracy(datasets.front().test, rng.next_u64());
  }
  table.rows.push_back(baseline);
  return table;
}

std::string BenchmarkTable::to_csv() const {
  std::string out = "scheme,model,train_acc,test_acc,gap\n";
  for (const auto& r : rows) {
    out += r.scheme + "," + r.model + "," + fixed6(r.train_acc) + "," + fixed6(r.test_acc) + "," +
           fixed6(r.gap()) + "\n";
  }
  return out;
}

nlohmann::json BenchmarkTable::to_json() const {
  nlohmann::json j;
  j["format_version"] = "1";
  j["seed"] = seed;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"scheme", r.scheme},
                         {"model", r.model},
                         {"train_acc", r.train_acc},
                         {"test_acc", r.test_acc},
                         {"gap", r.gap()}});
  }
  return j;
}

BenchmarkTable BenchmarkTable::from_json(const nlohmann::json& j) {
  BenchmarkTable t;
  t.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& r : j.at("rows")) {
    t.rows.push_back(BenchmarkRow{r.at("scheme").get<std::string>(), r.at("model").get<std::string>(),
                                  r.at("train_acc").get<double>(), r.at("test_acc").get<double>()});
  }
  return t;
}

std::string BenchmarkTable::to_text() const {
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof line, "%-10s %-7s %9s %9s %9s\n", "scheme", "model", "train", "test",
                "gap");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-10s %-7s %9.4f %9.4f %+9.4f\n", r.scheme.c_str(),
                  r.model.c_str(), r.train_acc, r.test_acc, r.gap());
    os << line;
  }
  return os.str();
}

}  // namespace bsedepth::learn
