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

#ifndef STYLEPROBE_DIRECTIONS_H_
#define STYLEPROBE_DIRECTIONS_H_

#include <string>
#include <vector>

#include "styleprobe/classifier.h"
#include "styleprobe/generator.h"
#include "styleprobe/rng.h"
#include "styleprobe/style.h"

namespace styleprobe {

inline constexpr int kDefaultLatentTrain = 20000;
inline constexpr int kDefaultLatentVal = 5000;
inline constexpr int kDeskLatentTrain = 4000;
inline constexpr int kDeskLatentVal = 1000;

// Default edit step sizes, ascending.
const std::vector<double>& DefaultSweepLambdas();

struct LatentDataset {
  std::vector<StyleVector> train_w;
  std::vector<int> train_y;  // {-1, +1}
  std::vector<StyleVector> val_w;
  std::vector<int> val_y;
};

// Label of a style under a model: +1 iff score(synthesize(all Single(w))) > 0.
int LatentLabel(const Generator& gen, const ClassifierModel& model, const std::string& scenario,
                const StyleVector& w);

// Draws z ~ N(0, I), maps to w and labels each style with the classifier.
// Throws std::invalid_argument when a count is < 1.
LatentDataset SampleLatentDataset(const Generator& gen, const ClassifierModel& model, const std::string& scenario,
                                  int n_train, int n_val, const Rng& rng);

struct DirectionFitConfig {
  double lr = 0.01;
  int batch_size = 64;
  int max_epochs = 200;
  int patience = 5;
  std::uint64_t seed = 0;
};

struct DirectionModel {
  std::vector<double> u;  // unit norm
  double bias = 0.0;      // logistic bias divided by the raw weight norm
  std::string attribute;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
  int epochs = 0;

  void Save(const std::string& path) const;
  static DirectionModel Load(const std::string& path);
  friend bool operator==(const DirectionModel&, const DirectionModel&) = default;
};

// Logistic regression fitted with mini-batch Adam on cross-entropy; stops
// once validation accuracy has not improved for `patience` epochs and keeps
// the best epoch. Throws std::invalid_argument when the training labels hold
// a single class or the splits are malformed.
DirectionModel FitDirection(const LatentDataset& data, const DirectionFitConfig& cfg = {},
                            const std::string& attribute = "");

struct AppliedDirection {
  StyleVector w;
  bool clamped = false;
};

// w + lambda * u, with components clamped to +-(1 - 1e-6) when they leave
// the open cube.
AppliedDirection ApplyDirection(const StyleVector& w, const DirectionModel& dir, double lambda);

struct SweepEntry {
  double lambda = 0.0;
  StyleVector w;
  bool clamped = false;
  ImageBuffer image;
  double score = 0.0;
};

struct SweepResult {
  std::vector<SweepEntry> entries;  // ascending lambda
};

// Edited style applied at every layer. Throws std::invalid_argument on an
// empty lambda list.
SweepResult Sweep(const Generator& gen, const StyleVector& w, const DirectionModel& dir,
                  std::vector<double> lambdas, const ClassifierModel& model, const std::string& scenario);

// Writes <stem>.png (image strip, ascending lambda) and <stem>.json
// ({"lambda": [...], "score": [...], "clamped": [...]}).
void ExportSweep(const SweepResult& sweep, const std::string& stem);

double Cosine(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace styleprobe

#endif  // STYLEPROBE_DIRECTIONS_H_
