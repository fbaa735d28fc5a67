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

#ifndef STYLEPROBE_CONFIG_H_
#define STYLEPROBE_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "styleprobe/scene.h"
#include "styleprobe/style.h"

namespace styleprobe {

struct GeneratorGeometry {
  int latent_dim = 16;
  int style_dim = 16;
  int num_layers = 6;
  LayerGrouping grouping{{2, 2, 2}, {"coarse", "middle", "fine"}};
  int image_size = 64;
  std::uint64_t mapping_seed = 20230117;
};

struct InterfaceSettings {
  int grid_count = 7;
  int worker_threads = 1;
  int port = 8080;
  // Latent dataset size used when a direction is fitted through the service.
  int latent_train = 4000;
  int latent_val = 1000;
};

// A model or direction file registered with the service. Relative paths are
// resolved against the config file's directory by LoadConfig.
struct ArtifactRef {
  std::string id;
  std::string scenario;  // models
  std::string model_id;  // directions
  std::string path;
};

struct WorkbenchConfig {
  GeneratorGeometry geometry;
  std::vector<SceneSpec> scenarios;
  InterfaceSettings interface;
  std::vector<ArtifactRef> models;
  std::vector<ArtifactRef> directions;

  const SceneSpec& Scenario(const std::string& id) const;  // throws std::out_of_range
  bool HasScenario(const std::string& id) const;
  void Validate() const;
};

// Built-in geometry and the toy-faces / toy-flowers-a / toy-flowers-b tables.
WorkbenchConfig DefaultConfig();
const std::string& DefaultConfigJson();

// Sections that are absent keep their defaults (including the built-in
// scenario tables).
WorkbenchConfig ParseConfig(const std::string& json_text);
WorkbenchConfig LoadConfig(const std::string& path);
std::string ConfigToJson(const WorkbenchConfig& config);

}  // namespace styleprobe

#endif  // STYLEPROBE_CONFIG_H_
