#include <filesystem>
#include <sstream>

#include "doctest.h"

#include "bsedepth/dataio.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using bsedepth::dataio::read_text;

namespace {

struct Result {
  int status;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = bsedepth::cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("bsedepth_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("usage errors exit nonzero with an error prefix") {
  const auto dir = scratch("usage");
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"generate", "--frames", "0", "--out", dir.string()},
           {"frobnicate"},
           {},
           {"bench", "--data", dir.string(), "--models", "nope"},
           {"label"}}) {
    const auto r = run(args);
    CHECK(r.status != 0);
    CHECK(r.err.rfind("error:", 0) == 0);
    CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  }
  CHECK(run({"--help"}).status == 0);
}

TEST_CASE("missing dataset is an error, not a crash") {
  const auto r = run({"label", "--data", scratch("nothing").string()});
  CHECK(r.status == 1);
  CHECK(r.err.rfind("error:", 0) == 0);
}

TEST_CASE("small pipeline end to end") {
  const auto dir = scratch("e2e");
  const auto d = dir.string();
  auto r = run({"generate", "--seed", "4", "--frames", "12", "--frame-size", "64", "--out", d});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("Cup B Left_Q2") != std::string::npos);

  CHECK(run({"bench", "--data", d}).status == 1);  // labels missing

  r = run({"label", "--data", d});
  REQUIRE(r.status == 0);
  const auto labels = nlohmann::json::parse(read_text(dir / "labels.json"));
  CHECK(labels.at("frames").size() == 12 * (12 + 2));
  const auto first = read_text(dir / "labels.json");
  REQUIRE(run({"label", "--data", d}).status == 0);
  CHECK(read_text(dir / "labels.json") == first);

  r = run({"bench", "--data", d, "--models", "svm", "--schemes", "lawlbp"});
  REQUIRE(r.status == 0);
  const auto report = nlohmann::json::parse(read_text(dir / "report.json"));
  CHECK(report.at("rows").size() == 2);

  r = run({"train", "--data", d, "--model", "gbt", "--scheme", "shalaw", "--model-file", (dir / "m.json").string()});
  REQUIRE(r.status == 0);
  r = run({"eval", "--data", d, "--model-file", (dir / "m.json").string()});
  REQUIRE(r.status == 0);
  CHECK(r.out.find("GBT ShaLaw") != std::string::npos);

  r = run({"extract", "--data", d, "--schemes", "ent,sha"});
  REQUIRE(r.status == 0);
  CHECK(fs::exists(dir / "features_Ent.csv"));

  r = run({"report", "--data", d});
  CHECK(r.status == 0);
  CHECK(r.out.find("Baseline") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("config file supplies flags and the command line wins") {
  const auto dir = scratch("config");
  fs::create_directories(dir);
  const auto cfg = dir / "cfg.json";
  bsedepth::dataio::write_text(cfg, R"({"frames": 0, "out": ")" + (dir / "data").string() + R"("})");
  auto r = run({"generate", "--config", cfg.string()});
  CHECK(r.status == 2);  // frames 0 from the file is rejected

  r = run({"generate", "--config", cfg.string(), "--frames", "6", "--frame-size", "64"});
  CHECK(r.status == 0);
  CHECK(fs::exists(dir / "data" / "manifest.json"));

  bsedepth::dataio::write_text(cfg, R"({"no_such_flag": 1})");
  CHECK(run({"generate", "--config", cfg.string()}).status == 2);
  fs::remove_all(dir);
}
