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

#ifndef STYLEPROBE_DATASET_H_
#define STYLEPROBE_DATASET_H_

#include <optional>
#include <string>
#include <vector>

#include "styleprobe/config.h"
#include "styleprobe/image.h"
#include "styleprobe/rng.h"
#include "styleprobe/scene.h"

namespace styleprobe {

enum class Split { kTrain, kVal };

struct LabeledExample {
  ImageBuffer image;
  int label = -1;    // binary label in {-1, +1}
  int bracket = -1;  // ordinal bracket index, -1 when the scene has none
  SceneParams params;
  Split split = Split::kTrain;
};

struct LabeledDataset {
  std::string scenario;
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> val;
};

struct DatasetOptions {
  // Overrides the scene's default confounder (e.g. "skin_tone").
  std::optional<std::string> confounder;
  // +1: confounder above its midpoint agrees with label +1; -1 reverses.
  int confounder_polarity = +1;
};

// Samples every attribute uniformly over its range, then re-draws the
// confounder so that its side of the midpoint agrees with the label with
// probability (1 + rho) / 2. The confounder's distance from the midpoint stays
// uniform, so its marginal does not depend on rho when labels are balanced.
// Sample i draws from rng.Derive("sample", i); generation order is irrelevant.
// Throws std::invalid_argument for rho outside [0,1] and std::out_of_range
// for an unknown scenario.
LabeledDataset MakeDataset(const WorkbenchConfig& config, const std::string& scenario, int n_train,
                           int n_val, double confound_rho, const Rng& rng,
                           const DatasetOptions& options = {});

// Fraction of examples whose confounder side agrees with the label.
double ConfounderAgreement(const SceneSpec& spec, const std::vector<LabeledExample>& examples,
                           const std::string& confounder, int polarity = +1);

// Writes images/<split>_<index>.png plus manifest.jsonl (one JSON record per
// image: filename, scenario, split, label, bracket, params).
void ExportDataset(const LabeledDataset& dataset, const SceneSpec& spec, const std::string& dir);
// Reads a directory written by ExportDataset; images come from the PNG files.
LabeledDataset ImportDataset(const std::string& dir, const SceneSpec& spec);

}  // namespace styleprobe

#endif  // STYLEPROBE_DATASET_H_
