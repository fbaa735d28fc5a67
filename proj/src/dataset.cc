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

#include "styleprobe/dataset.h"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "styleprobe/image_io.h"
#include "styleprobe/render.h"

namespace styleprobe {
namespace {

using nlohmann::json;

LabeledExample SampleExample(const WorkbenchConfig& config, const SceneSpec& spec, Rng rng,
                             double rho, const std::optional<std::string>& confounder,
                             int polarity) {
  LabeledExample ex;
  for (const auto& a : spec.attributes) ex.params.values.push_back(SampleUniform(rng, a.min, a.max));
  ex.label = LabelOf(spec, ex.params);
  if (confounder) {
    const int ci = spec.AttributeIndex(*confounder);
    const auto& a = spec.attributes[static_cast<std::size_t>(ci)];
    const double half = 0.5 * (a.max - a.min);
    const double magnitude = SampleUniform(rng, 0.0, half);
    const bool agree = SampleUniform(rng, 0.0, 1.0) < 0.5 * (1.0 + rho);
    const int side = (agree ? ex.label : -ex.label) * polarity;
    ex.params.values[static_cast<std::size_t>(ci)] = a.midpoint() + side * magnitude;
  }
  if (spec.brackets) ex.bracket = BracketOf(spec, ex.params);
  ex.image = RenderScene(spec, ex.params, config.geometry.image_size);
  return ex;
}

}  // namespace

LabeledDataset MakeDataset(const WorkbenchConfig& config, const std::string& scenario, int n_train,
                           int n_val, double confound_rho, const Rng& rng,
                           const DatasetOptions& options) {
  if (!(confound_rho >= 0.0 && confound_rho <= 1.0)) {
    throw std::invalid_argument("make_dataset: confound_rho must lie in [0,1]");
  }
  if (n_train < 0 || n_val < 0) throw std::invalid_argument("make_dataset: negative count");
  const SceneSpec& spec = config.Scenario(scenario);
  std::optional<std::string> confounder = options.confounder ? options.confounder : spec.confounder;
  if (confounder && spec.AttributeIndex(*confounder) < 0) {
    throw std::invalid_argument("make_dataset: unknown confounder '" + *confounder + "'");
  }
  LabeledDataset ds;
  ds.scenario = scenario;
  for (int i = 0; i < n_train + n_val; ++i) {
    auto ex = SampleExample(config, spec, rng.Derive("sample", static_cast<std::uint64_t>(i)), confound_rho,
                            confounder, options.confounder_polarity);
    if (i < n_train) {
      ex.split = Split::kTrain;
      ds.train.push_back(std::move(ex));
    } else {
      ex.split = Split::kVal;
      ds.val.push_back(std::move(ex));
    }
  }
  return ds;
}

double ConfounderAgreement(const SceneSpec& spec, const std::vector<LabeledExample>& examples,
                           const std::string& confounder, int polarity) {
  const int ci = spec.AttributeIndex(confounder);
  if (ci < 0) throw std::invalid_argument("unknown confounder '" + confounder + "'");
  const double mid = spec.attributes[static_cast<std::size_t>(ci)].midpoint();
  if (examples.empty()) return 0.0;
  int agree = 0;
  for (const auto& ex : examples) {
    const int side = ex.params.values[static_cast<std::size_t>(ci)] > mid ? +1 : -1;
    if (side * polarity == ex.label) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(examples.size());
}

void ExportDataset(const LabeledDataset& dataset, const SceneSpec& spec, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "images");
  std::ofstream manifest(fs::path(dir) / "manifest.jsonl");
  if (!manifest) throw std::runtime_error("cannot write manifest in '" + dir + "'");
  auto emit = [&](const std::vector<LabeledExample>& examples, const char* split) {
    for (std::size_t i = 0; i < examples.size(); ++i) {
      const auto& ex = examples[i];
      std::ostringstream name;
      name << "images/" << split << "_" << std::setw(6) << std::setfill('0') << i << ".png";
      WritePng((fs::path(dir) / name.str()).string(), ex.image);
      json params = json::object();
      for (std::size_t a = 0; a < spec.attributes.size(); ++a) {
        params[spec.attributes[a].name] = ex.params.values[a];
      }
      json rec = {{"filename", name.str()}, {"scenario", dataset.scenario}, {"split", split},
                  {"label", ex.label},      {"bracket", ex.bracket},        {"params", params}};
      manifest << rec.dump() << "\n";
    }
  };
  emit(dataset.train, "train");
  emit(dataset.val, "val");
}

LabeledDataset ImportDataset(const std::string& dir, const SceneSpec& spec) {
  namespace fs = std::filesystem;
  std::ifstream manifest(fs::path(dir) / "manifest.jsonl");
  if (!manifest) throw std::runtime_error("cannot read manifest in '" + dir + "'");
  LabeledDataset ds;
  ds.scenario = spec.id;
  std::string line;
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line);
    LabeledExample ex;
    ex.label = rec.at("label").get<int>();
    ex.bracket = rec.value("bracket", -1);
    const auto& params = rec.at("params");
    for (const auto& a : spec.attributes) ex.params.values.push_back(params.at(a.name).get<double>());
    ex.image = ReadPng((fs::path(dir) / rec.at("filename").get<std::string>()).string());
    if (rec.contains("scenario")) ds.scenario = rec.at("scenario").get<std::string>();
    if (rec.at("split").get<std::string>() == "train") {
      ex.split = Split::kTrain;
      ds.train.push_back(std::move(ex));
    } else {
      ex.split = Split::kVal;
      ds.val.push_back(std::move(ex));
    }
  }
  return ds;
}

}  // namespace styleprobe
