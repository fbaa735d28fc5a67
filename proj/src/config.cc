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

#include "styleprobe/config.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace styleprobe {
namespace {

using nlohmann::json;

const char* kDefaultConfig = R"json({
  "generator": {
    "latent_dim": 16,
    "style_dim": 16,
    "layers": 6,
    "grouping": [2, 2, 2],
    "group_names": ["coarse", "middle", "fine"],
    "image_size": 64,
    "mapping_seed": 20230117
  },
  "interface": {"grid_count": 7, "worker_threads": 1, "port": 8080},
  "scenarios": [
    {
      "id": "toy-faces",
      "renderer": "face",
      "palette": "default",
      "attributes": [
        {"name": "face_x",                "layer": 1, "component": 0,  "min": -2.0,  "max": 2.0},
        {"name": "face_y",                "layer": 1, "component": 1,  "min": -2.0,  "max": 2.0},
        {"name": "tilt",                  "layer": 1, "component": 2,  "min": -0.12, "max": 0.12},
        {"name": "face_scale",            "layer": 2, "component": 3,  "min": 0.93,  "max": 1.07},
        {"name": "face_aspect",           "layer": 2, "component": 4,  "min": 0.9,   "max": 1.15},
        {"name": "mouth_curvature",       "layer": 3, "component": 5,  "min": -1.0,  "max": 1.0},
        {"name": "eye_size",              "layer": 3, "component": 6,  "min": 1.9,   "max": 2.9},
        {"name": "hair_length",           "layer": 4, "component": 7,  "min": 0.0,   "max": 1.0},
        {"name": "mouth_width",           "layer": 4, "component": 8,  "min": 0.8,   "max": 1.2},
        {"name": "skin_tone",             "layer": 5, "component": 9,  "min": 0.0,   "max": 1.0},
        {"name": "hair_color",            "layer": 5, "component": 10, "min": 0.0,   "max": 1.0},
        {"name": "makeup_tint",           "layer": 5, "component": 11, "min": -1.0,  "max": 1.0},
        {"name": "background_brightness", "layer": 6, "component": 12, "min": 0.1,   "max": 0.9},
        {"name": "lighting",              "layer": 6, "component": 13, "min": -1.0,  "max": 1.0}
      ],
      "label": [{"attribute": "mouth_curvature", "op": ">", "threshold": 0.0}],
      "confounder": "makeup_tint",
      "brackets": {
        "attribute": "face_scale", "value_min": 0.0, "value_max": 19.0,
        "lower": [0.0, 3.0, 10.0], "upper": [2.0, 9.0, 19.0], "centers": [1.0, 6.0, 14.5]
      }
    },
    {
      "id": "toy-flowers-a",
      "renderer": "flower",
      "palette": "daisy-poppy",
      "attributes": [
        {"name": "center_x",              "layer": 1, "component": 0,  "min": -3.0,  "max": 3.0},
        {"name": "center_y",              "layer": 1, "component": 1,  "min": -3.0,  "max": 3.0},
        {"name": "scale",                 "layer": 1, "component": 2,  "min": 0.9,   "max": 1.1},
        {"name": "rotation",              "layer": 2, "component": 3,  "min": -17.0, "max": 17.0},
        {"name": "petal_width",           "layer": 2, "component": 4,  "min": 0.0,   "max": 1.0},
        {"name": "petal_count",           "layer": 3, "component": 5,  "min": 5.0,   "max": 12.0},
        {"name": "petal_length",          "layer": 3, "component": 6,  "min": 8.0,   "max": 14.0},
        {"name": "disc_radius",           "layer": 4, "component": 7,  "min": 3.0,   "max": 8.0},
        {"name": "petal_hue",             "layer": 5, "component": 8,  "min": -1.0,  "max": 1.0},
        {"name": "disc_darkness",         "layer": 5, "component": 9,  "min": 0.0,   "max": 1.0},
        {"name": "background_brightness", "layer": 6, "component": 10, "min": 0.1,   "max": 0.9},
        {"name": "lighting",              "layer": 6, "component": 11, "min": -1.0,  "max": 1.0}
      ],
      "label": [{"attribute": "petal_hue", "op": "<", "threshold": 0.0}],
      "confounder": "background_brightness"
    },
    {
      "id": "toy-flowers-b",
      "renderer": "flower",
      "palette": "susan-sunflower",
      "attributes": [
        {"name": "center_x",              "layer": 1, "component": 0,  "min": -2.0,  "max": 2.0},
        {"name": "center_y",              "layer": 1, "component": 1,  "min": -2.0,  "max": 2.0},
        {"name": "scale",                 "layer": 1, "component": 2,  "min": 0.9,   "max": 1.1},
        {"name": "rotation",              "layer": 2, "component": 3,  "min": -17.0, "max": 17.0},
        {"name": "petal_width",           "layer": 2, "component": 4,  "min": 0.0,   "max": 1.0},
        {"name": "petal_count",           "layer": 3, "component": 5,  "min": 8.0,   "max": 16.0},
        {"name": "petal_length",          "layer": 3, "component": 6,  "min": 7.0,   "max": 12.0},
        {"name": "disc_radius",           "layer": 4, "component": 7,  "min": 3.0,   "max": 10.0},
        {"name": "petal_hue",             "layer": 5, "component": 8,  "min": -1.0,  "max": 1.0},
        {"name": "disc_darkness",         "layer": 5, "component": 9,  "min": 0.0,   "max": 1.0},
        {"name": "background_brightness", "layer": 6, "component": 10, "min": 0.1,   "max": 0.9},
        {"name": "lighting",              "layer": 6, "component": 11, "min": -1.0,  "max": 1.0}
      ],
      "label": [
        {"attribute": "disc_radius",   "op": "<", "threshold": 6.5},
        {"attribute": "disc_darkness", "op": ">", "threshold": 0.5}
      ]
    }
  ]
})json";

SceneSpec ParseScene(const json& j) {
  SceneSpec s;
  s.id = j.at("id").get<std::string>();
  s.renderer = j.at("renderer").get<std::string>();
  s.palette = j.value("palette", std::string("default"));
  for (const auto& a : j.at("attributes")) {
    AttributeSpec attr;
    attr.name = a.at("name").get<std::string>();
    // Layers are 1-based in the file.
    attr.layer = a.at("layer").get<int>() - 1;
    attr.component = a.at("component").get<int>();
    attr.min = a.at("min").get<double>();
    attr.max = a.at("max").get<double>();
    attr.rendered = a.value("rendered", true);
    s.attributes.push_back(attr);
  }
  for (const auto& c : j.at("label")) {
    LabelClause clause;
    clause.attribute = c.at("attribute").get<std::string>();
    clause.op = c.at("op").get<std::string>();
    clause.threshold = c.at("threshold").get<double>();
    s.label_clauses.push_back(clause);
  }
  if (j.contains("confounder") && !j.at("confounder").is_null()) {
    s.confounder = j.at("confounder").get<std::string>();
  }
  if (j.contains("brackets")) {
    const auto& b = j.at("brackets");
    BracketRule rule;
    rule.attribute = b.at("attribute").get<std::string>();
    rule.value_min = b.at("value_min").get<double>();
    rule.value_max = b.at("value_max").get<double>();
    rule.lower_bounds = b.at("lower").get<std::vector<double>>();
    rule.upper_bounds = b.at("upper").get<std::vector<double>>();
    rule.centers = b.at("centers").get<std::vector<double>>();
    s.brackets = rule;
  }
  return s;
}

json SceneToJson(const SceneSpec& s) {
  json j;
  j["id"] = s.id;
  j["renderer"] = s.renderer;
  j["palette"] = s.palette;
  j["attributes"] = json::array();
  for (const auto& a : s.attributes) {
    j["attributes"].push_back({{"name", a.name},
                               {"layer", a.layer + 1},
                               {"component", a.component},
                               {"min", a.min},
                               {"max", a.max},
                               {"rendered", a.rendered}});
  }
  j["label"] = json::array();
  for (const auto& c : s.label_clauses) {
    j["label"].push_back({{"attribute", c.attribute}, {"op", c.op}, {"threshold", c.threshold}});
  }
  if (s.confounder) j["confounder"] = *s.confounder;
  if (s.brackets) {
    const auto& b = *s.brackets;
    j["brackets"] = {{"attribute", b.attribute}, {"value_min", b.value_min},
                     {"value_max", b.value_max}, {"lower", b.lower_bounds},
                     {"upper", b.upper_bounds},  {"centers", b.centers}};
  }
  return j;
}

}  // namespace

const SceneSpec& WorkbenchConfig::Scenario(const std::string& id) const {
  for (const auto& s : scenarios) {
    if (s.id == id) return s;
  }
  throw std::out_of_range("unknown scenario '" + id + "'");
}

bool WorkbenchConfig::HasScenario(const std::string& id) const {
  for (const auto& s : scenarios) {
    if (s.id == id) return true;
  }
  return false;
}

void WorkbenchConfig::Validate() const {
  const auto& g = geometry;
  if (g.latent_dim < 1 || g.style_dim < 1) throw std::invalid_argument("config: dimensions must be >= 1");
  if (g.latent_dim != g.style_dim) {
    throw std::invalid_argument("config: the invertible mapping requires latent_dim == style_dim");
  }
  if (g.num_layers < 1) throw std::invalid_argument("config: layers must be >= 1");
  if (g.grouping.num_layers() != g.num_layers) {
    throw std::invalid_argument("config: grouping does not cover all layers");
  }
  if (g.image_size < 8) throw std::invalid_argument("config: image_size must be >= 8");
  if (interface.grid_count < 1) throw std::invalid_argument("config: grid_count must be >= 1");
  if (interface.worker_threads < 1) throw std::invalid_argument("config: worker_threads must be >= 1");
  if (interface.latent_train < 1 || interface.latent_val < 1) {
    throw std::invalid_argument("config: latent dataset sizes must be >= 1");
  }
  for (const auto& m : models) {
    if (!HasScenario(m.scenario)) throw std::invalid_argument("config: model '" + m.id + "' names unknown scenario");
  }
  for (const auto& s : scenarios) s.Validate(g.num_layers, g.style_dim);
}

const std::string& DefaultConfigJson() {
  static const std::string text(kDefaultConfig);
  return text;
}

WorkbenchConfig DefaultConfig() { return ParseConfig(DefaultConfigJson()); }

WorkbenchConfig ParseConfig(const std::string& json_text) {
  const json j = json::parse(json_text);
  WorkbenchConfig cfg;
  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    auto& geo = cfg.geometry;
    geo.latent_dim = g.value("latent_dim", geo.latent_dim);
    geo.style_dim = g.value("style_dim", geo.style_dim);
    geo.num_layers = g.value("layers", geo.num_layers);
    geo.image_size = g.value("image_size", geo.image_size);
    geo.mapping_seed = g.value("mapping_seed", geo.mapping_seed);
    if (g.contains("grouping")) {
      geo.grouping = LayerGrouping(g.at("grouping").get<std::vector<int>>(),
                                   g.value("group_names", std::vector<std::string>{}));
    }
  }
  if (j.contains("interface")) {
    const auto& i = j.at("interface");
    cfg.interface.grid_count = i.value("grid_count", cfg.interface.grid_count);
    cfg.interface.worker_threads = i.value("worker_threads", cfg.interface.worker_threads);
    cfg.interface.port = i.value("port", cfg.interface.port);
    cfg.interface.latent_train = i.value("latent_train", cfg.interface.latent_train);
    cfg.interface.latent_val = i.value("latent_val", cfg.interface.latent_val);
  }
  if (j.contains("scenarios")) {
    for (const auto& s : j.at("scenarios")) cfg.scenarios.push_back(ParseScene(s));
  } else if (&json_text != &DefaultConfigJson()) {
    cfg.scenarios = DefaultConfig().scenarios;
  }
  for (const auto& m : j.value("models", json::array())) {
    cfg.models.push_back({m.at("id").get<std::string>(), m.at("scenario").get<std::string>(), "",
                          m.at("path").get<std::string>()});
  }
  for (const auto& d : j.value("directions", json::array())) {
    cfg.directions.push_back({d.at("id").get<std::string>(), "", d.value("model_id", std::string()),
                              d.at("path").get<std::string>()});
  }
  cfg.Validate();
  return cfg;
}

WorkbenchConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  WorkbenchConfig cfg = ParseConfig(ss.str());
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  for (auto* refs : {&cfg.models, &cfg.directions}) {
    for (auto& r : *refs) {
      if (std::filesystem::path(r.path).is_relative()) r.path = (base / r.path).string();
    }
  }
  return cfg;
}

std::string ConfigToJson(const WorkbenchConfig& config) {
  json j;
  const auto& g = config.geometry;
  j["generator"] = {{"latent_dim", g.latent_dim},
                    {"style_dim", g.style_dim},
                    {"layers", g.num_layers},
                    {"grouping", g.grouping.sizes()},
                    {"group_names", g.grouping.names()},
                    {"image_size", g.image_size},
                    {"mapping_seed", g.mapping_seed}};
  j["interface"] = {{"grid_count", config.interface.grid_count},
                    {"worker_threads", config.interface.worker_threads},
                    {"port", config.interface.port},
                    {"latent_train", config.interface.latent_train},
                    {"latent_val", config.interface.latent_val}};
  j["scenarios"] = json::array();
  for (const auto& s : config.scenarios) j["scenarios"].push_back(SceneToJson(s));
  j["models"] = json::array();
  for (const auto& m : config.models) j["models"].push_back({{"id", m.id}, {"scenario", m.scenario}, {"path", m.path}});
  j["directions"] = json::array();
  for (const auto& d : config.directions) {
    j["directions"].push_back({{"id", d.id}, {"model_id", d.model_id}, {"path", d.path}});
  }
  return j.dump(2);
}

}  // namespace styleprobe
