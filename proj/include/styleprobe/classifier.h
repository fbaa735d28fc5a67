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

#ifndef STYLEPROBE_CLASSIFIER_H_
#define STYLEPROBE_CLASSIFIER_H_

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "styleprobe/dataset.h"
#include "styleprobe/image.h"
#include "styleprobe/rng.h"

namespace styleprobe {

enum class HeadKind { kBinary, kBrackets };
enum class Activation { kRelu, kSoftplus };

struct ClassifierArchitecture {
  int image_size = 64;
  int pool = 2;  // 1 (no pooling) or 2 (2x average pooling)
  std::vector<int> hidden = {128, 32};
  HeadKind head = HeadKind::kBinary;
  int num_brackets = 0;  // K when head == kBrackets
  Activation activation = Activation::kSoftplus;

  int input_side() const { return image_size / pool; }
  int input_features() const { return input_side() * input_side() * 3; }
  int outputs() const { return head == HeadKind::kBinary ? 1 : num_brackets; }
  friend bool operator==(const ClassifierArchitecture&, const ClassifierArchitecture&) = default;
};

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;
};

// Same-shape companion of ImageBuffer for signed per-pixel quantities.
struct PixelArray {
  int height = 0;
  int width = 0;
  std::vector<double> data;
};

// Rectifier MLP over (optionally pooled) normalized pixels.
class ClassifierModel {
 public:
  ClassifierModel() = default;
  static ClassifierModel Initialize(const ClassifierArchitecture& arch, const Rng& rng);

  const ClassifierArchitecture& architecture() const { return arch_; }
  const std::array<double, 3>& channel_mean() const { return mean_; }
  const std::array<double, 3>& channel_std() const { return std_; }
  void set_normalization(const std::array<double, 3>& mean, const std::array<double, 3>& std);
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& mutable_layers() { return layers_; }

  // Normalized, pooled input vector. Throws std::invalid_argument on a size
  // mismatch.
  Eigen::VectorXd Features(const ImageBuffer& image) const;
  Eigen::VectorXd Logits(const ImageBuffer& image) const;
  Eigen::MatrixXd ForwardBatch(const Eigen::MatrixXd& features) const;

  // Gradient of the first output logit (binary) w.r.t. every pixel value.
  PixelArray LogitGradient(const ImageBuffer& image) const;

  void Save(const std::string& path) const;
  static ClassifierModel Load(const std::string& path);
  std::string Serialize() const;
  static ClassifierModel Deserialize(const std::string& bytes);

  friend bool operator==(const ClassifierModel& a, const ClassifierModel& b);

 private:
  ClassifierArchitecture arch_;
  std::array<double, 3> mean_{0.0, 0.0, 0.0};
  std::array<double, 3> std_{1.0, 1.0, 1.0};
  std::vector<DenseLayer> layers_;
};

struct EpochMetrics {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainConfig {
  int epochs = 10;
  double lr = 3e-4;
  int batch_size = 64;
  int pool = 2;
  std::vector<int> hidden = {128, 32};
  HeadKind head = HeadKind::kBinary;
  Activation activation = Activation::kSoftplus;
};

struct TrainResult {
  ClassifierModel model;
  std::vector<EpochMetrics> epochs;  // entry 0 describes the initial model
  bool single_class = false;         // warning flag: training labels had one class
};

// Mini-batch Adam on cross-entropy (sigmoid for the binary head, softmax for
// brackets). Deterministic given rng. Throws std::invalid_argument on an
// empty training split or lr <= 0.
TrainResult TrainClassifier(const LabeledDataset& dataset, const TrainConfig& config, const Rng& rng);

// Accuracy and mean cross-entropy of a model on examples.
EpochMetrics Evaluate(const ClassifierModel& model, const std::vector<LabeledExample>& examples);

// tanh of the binary logit, in [-1, 1].
double Score(const ClassifierModel& model, const ImageBuffer& image);
double Logit(const ClassifierModel& model, const ImageBuffer& image);
// d Score / d pixel.
PixelArray InputGradient(const ClassifierModel& model, const ImageBuffer& image);

struct BracketSpec {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> centers;

  // Brackets 0-2, 3-9, 10-19 with centers 1, 6, 14.5.
  static BracketSpec AgeDefaults();
  void Validate() const;
};

// Softmax-weighted mean of bracket centers. Throws std::invalid_argument when
// the head size differs from the number of brackets.
double ContinuousScore(const ClassifierModel& model, const ImageBuffer& image, const BracketSpec& brackets);
double ContinuousScoreFromLogits(const Eigen::VectorXd& logits, const BracketSpec& brackets);

struct Prediction {
  int value = -1;  // {-1,+1} for binary, bracket index otherwise
  double confidence = 0.0;
};

// Binary: sign of the logit with ties to -1, confidence |tanh(logit)|.
// Brackets: argmax with softmax probability as confidence.
Prediction PredictClass(const ClassifierModel& model, const ImageBuffer& image);
Prediction PredictFromLogits(HeadKind head, const Eigen::VectorXd& logits);

}  // namespace styleprobe

#endif  // STYLEPROBE_CLASSIFIER_H_
