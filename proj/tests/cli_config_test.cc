/*
 * Copyright 2026 The StyleProbe Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "styleprobe/classifier.h"
#include "styleprobe/config.h"

namespace styleprobe {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path ScratchDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("styleprobe_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST_CASE("default config") {
  const WorkbenchConfig cfg = DefaultConfig();
  CHECK(cfg.geometry.latent_dim == 16);
  CHECK(cfg.geometry.style_dim == 16);
  CHECK(cfg.geometry.num_layers == 6);
  CHECK(cfg.geometry.grouping.sizes() == std::vector<int>{2, 2, 2});
  CHECK(cfg.geometry.grouping.names() == std::vector<std::string>{"coarse", "middle", "fine"});
  CHECK(cfg.geometry.image_size == 64);
  CHECK(cfg.interface.grid_count == 7);
  CHECK(cfg.interface.worker_threads == 1);
  CHECK(cfg.interface.port == 8080);
  REQUIRE(cfg.scenarios.size() == 3);
  CHECK(cfg.HasScenario("toy-faces"));
  CHECK(cfg.HasScenario("toy-flowers-a"));
  CHECK(cfg.HasScenario("toy-flowers-b"));
  CHECK_FALSE(cfg.HasScenario("toy-cars"));
  CHECK_THROWS_AS(cfg.Scenario("toy-cars"), std::out_of_range);
  // Layers are one-based in the file.
  const AttributeSpec& mouth = cfg.Scenario("toy-faces").Attribute("mouth_curvature");
  CHECK(mouth.layer == 2);
  CHECK(mouth.component == 5);
  CHECK(cfg.Scenario("toy-faces").Attribute("makeup_tint").layer == 4);
  CHECK(cfg.models.empty());
  CHECK(cfg.directions.empty());
}

TEST_CASE("partial config keeps the defaults") {
  const WorkbenchConfig cfg = ParseConfig(R"({"interface": {"grid_count": 3, "port": 9000}})");
  CHECK(cfg.interface.grid_count == 3);
  CHECK(cfg.interface.port == 9000);
  CHECK(cfg.interface.worker_threads == 1);
  CHECK(cfg.interface.latent_train == 4000);
  CHECK(cfg.geometry.num_layers == 6);
  CHECK(cfg.scenarios.size() == 3);

  const WorkbenchConfig g = ParseConfig(
      R"({"generator": {"layers": 4, "grouping": [1, 3], "group_names": ["head", "tail"], "mapping_seed": 5},
          "scenarios": []})");
  CHECK(g.geometry.num_layers == 4);
  CHECK(g.geometry.grouping.sizes() == std::vector<int>{1, 3});
  CHECK(g.geometry.mapping_seed == 5u);
  CHECK(g.scenarios.empty());
}

TEST_CASE("invalid configs are rejected") {
  CHECK_THROWS_AS(ParseConfig(R"({"generator": {"latent_dim": 8}})"), std::invalid_argument);
  CHECK_THROWS_AS(ParseConfig(R"({"generator": {"grouping": [2, 2]}})"), std::invalid_argument);
  CHECK_THROWS_AS(ParseConfig(R"({"generator": {"image_size": 4}})"), std::invalid_argument);
  CHECK_THROWS_AS(ParseConfig(R"({"interface": {"grid_count": 0}})"), std::invalid_argument);
  CHECK_THROWS_AS(ParseConfig(R"({"interface": {"worker_threads": 0}})"), std::invalid_argument);
  CHECK_THROWS_AS(ParseConfig(R"({"interface": {"latent_val": 0}})"), std::invalid_argument);
  CHECK_THROWS_AS(ParseConfig(R"({"models": [{"id": "m", "scenario": "toy-cars", "path": "m.bin"}]})"),
                  std::invalid_argument);
  // Attribute on a layer the generator does not have.
  json j = json::parse(ConfigToJson(DefaultConfig()));
  j["scenarios"][0]["attributes"][0]["layer"] = 7;
  CHECK_THROWS_AS(ParseConfig(j.dump()), std::invalid_argument);
  // Component outside the style vector.
  j = json::parse(ConfigToJson(DefaultConfig()));
  j["scenarios"][0]["attributes"][0]["component"] = 16;
  CHECK_THROWS_AS(ParseConfig(j.dump()), std::invalid_argument);
  CHECK_THROWS(ParseConfig("{not json"));
  CHECK_THROWS_AS(LoadConfig("/nonexistent/styleprobe.json"), std::runtime_error);
}

TEST_CASE("config json round trip") {
  WorkbenchConfig cfg = DefaultConfig();
  cfg.interface.grid_count = 5;
  cfg.models.push_back({"faces", "toy-faces", "", "/abs/faces.bin"});
  cfg.directions.push_back({"smile", "", "faces", "/abs/smile.json"});
  const std::string text = ConfigToJson(cfg);
  const WorkbenchConfig back = ParseConfig(text);
  CHECK(ConfigToJson(back) == text);
  CHECK(back.interface.grid_count == 5);
  REQUIRE(back.models.size() == 1);
  CHECK(back.models[0].scenario == "toy-faces");
  REQUIRE(back.directions.size() == 1);
  CHECK(back.directions[0].model_id == "faces");
  const auto& a = DefaultConfig().Scenario("toy-flowers-a").Attribute("rotation");
  const auto& b = back.Scenario("toy-flowers-a").Attribute("rotation");
  CHECK(a.layer == b.layer);
  CHECK(a.min == b.min);
  CHECK(a.max == b.max);
}

TEST_CASE("artifact paths resolve against the config directory") {
  const fs::path dir = ScratchDir("config_paths");
  fs::create_directories(dir / "models");
  {
    std::ofstream out(dir / "workbench.json");
    out << R"({"models": [{"id": "faces", "scenario": "toy-faces", "path": "models/faces.bin"},
                          {"id": "abs", "scenario": "toy-faces", "path": "/srv/abs.bin"}],
               "directions": [{"id": "smile", "model_id": "faces", "path": "smile.json"}]})";
  }
  const WorkbenchConfig cfg = LoadConfig((dir / "workbench.json").string());
  REQUIRE(cfg.models.size() == 2);
  CHECK(fs::path(cfg.models[0].path) == dir / "models/faces.bin");
  CHECK(cfg.models[1].path == "/srv/abs.bin");
  CHECK(fs::path(cfg.directions[0].path) == dir / "smile.json");
  fs::remove_all(dir);
}

int RunCli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string("\"") + STYLEPROBE_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  return std::system(cmd.c_str());
}

TEST_CASE("command line pipeline") {
  const fs::path dir = ScratchDir("cli");
  const fs::path log = dir / "log.txt";

  REQUIRE(RunCli("config", log) == 0);
  CHECK(ConfigToJson(ParseConfig(Slurp(log))) == ConfigToJson(DefaultConfig()));

  REQUIRE(RunCli("prepare-dataset --scenario toy-faces --n-train 48 --n-val 16 --seed 3 --out \"" +
                     (dir / "data").string() + "\"",
                 log) == 0);
  CHECK(fs::exists(dir / "data" / "manifest.jsonl"));

  REQUIRE(RunCli("train-classifier --epochs 1 --data \"" + (dir / "data").string() + "\" --out \"" +
                     (dir / "faces.bin").string() + "\"",
                 log) == 0);
  CHECK(Slurp(log).find("epoch 1 ") != std::string::npos);
  const ClassifierModel m = ClassifierModel::Load((dir / "faces.bin").string());
  CHECK(m.architecture().head == HeadKind::kBinary);

  REQUIRE(RunCli("fit-direction --scenario toy-faces --n-train 64 --n-val 16 --model \"" +
                     (dir / "faces.bin").string() + "\" --out \"" + (dir / "dir.json").string() + "\"",
                 log) == 0);
  CHECK(json::parse(Slurp(dir / "dir.json")).contains("u"));

  CHECK(RunCli("prepare-dataset --scenario toy-cars --out \"" + (dir / "bad").string() + "\"", log) != 0);
  CHECK(Slurp(log).find("error:") != std::string::npos);
  CHECK(RunCli("no-such-command", log) != 0);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace styleprobe
