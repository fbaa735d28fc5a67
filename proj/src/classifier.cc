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

#include "styleprobe/classifier.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "styleprobe/adam.h"

namespace styleprobe {
namespace {

template <typename Derived>
void Activate(Activation kind, Eigen::MatrixBase<Derived>& z) {
  if (kind == Activation::kRelu) {
    z = z.cwiseMax(0.0);
  } else {
    z = z.unaryExpr([](double v) { return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v))); });
  }
}

// Derivative expressed through the activation value a = act(z).
template <typename Derived>
typename Derived::PlainObject ActivationSlope(Activation kind, const Eigen::MatrixBase<Derived>& a) {
  if (kind == Activation::kRelu) return a.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; });
  return a.unaryExpr([](double v) { return -std::expm1(-v); });
}

using nlohmann::json;

constexpr char kMagic[] = "STYLEPROBE-CLASSIFIER";
constexpr int kFormatVersion = 1;

void CheckImage(const ClassifierArchitecture& arch, const ImageBuffer& image) {
  if (image.height != arch.image_size || image.width != arch.image_size) {
    throw std::invalid_argument("classifier: expected " + std::to_string(arch.image_size) + "x" +
                                std::to_string(arch.image_size) + " image, got " +
                                std::to_string(image.height) + "x" + std::to_string(image.width));
  }
}

double StableLogSigmoid(double z) { return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

Eigen::VectorXd Softmax(const Eigen::VectorXd& z) {
  const double m = z.maxCoeff();
  Eigen::VectorXd e = (z.array() - m).exp();
  return e / e.sum();
}

int Target(const ClassifierArchitecture& arch, const LabeledExample& ex) {
  return arch.head == HeadKind::kBinary ? ex.label : ex.bracket;
}

// Per-example cross-entropy and correctness given the output column.
std::pair<double, bool> LossAndHit(const ClassifierArchitecture& arch, const Eigen::VectorXd& z, int target) {
  if (arch.head == HeadKind::kBinary) {
    const double y = target > 0 ? 1.0 : 0.0;
    const double loss = -(y * StableLogSigmoid(z(0)) + (1.0 - y) * StableLogSigmoid(-z(0)));
    const int pred = z(0) > 0.0 ? +1 : -1;
    return {loss, pred == target};
  }
  const double m = z.maxCoeff();
  const double lse = m + std::log((z.array() - m).exp().sum());
  Eigen::Index arg = 0;
  z.maxCoeff(&arg);
  return {lse - z(target), static_cast<int>(arg) == target};
}

std::array<double, 3> ChannelMean(const std::vector<LabeledExample>& xs) {
  std::array<double, 3> sum{0, 0, 0};
  std::size_t count = 0;
  for (const auto& ex : xs) {
    for (std::size_t i = 0; i < ex.image.data.size(); i += 3) {
      for (int c = 0; c < 3; ++c) sum[c] += ex.image.data[i + c];
    }
    count += ex.image.data.size() / 3;
  }
  for (double& s : sum) s /= static_cast<double>(count);
  return sum;
}

std::array<double, 3> ChannelStd(const std::vector<LabeledExample>& xs, const std::array<double, 3>& mean) {
  std::array<double, 3> sum{0, 0, 0};
  std::size_t count = 0;
  for (const auto& ex : xs) {
    for (std::size_t i = 0; i < ex.image.data.size(); i += 3) {
      for (int c = 0; c < 3; ++c) {
        const double d = ex.image.data[i + c] - mean[c];
        sum[c] += d * d;
      }
    }
    count += ex.image.data.size() / 3;
  }
  for (double& s : sum) s = std::max(std::sqrt(s / static_cast<double>(count)), 1e-6);
  return sum;
}

Eigen::MatrixXd FeatureMatrix(const ClassifierModel& model, const std::vector<LabeledExample>& xs) {
  Eigen::MatrixXd out(model.architecture().input_features(), static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = model.Features(xs[i].image);
  return out;
}

}  // namespace

ClassifierModel ClassifierModel::Initialize(const ClassifierArchitecture& arch, const Rng& rng) {
  if (arch.pool != 1 && arch.pool != 2) throw std::invalid_argument("classifier: pool must be 1 or 2");
  if (arch.image_size % arch.pool != 0) throw std::invalid_argument("classifier: image size not divisible by pool");
  if (arch.head == HeadKind::kBrackets && arch.num_brackets < 2) {
    throw std::invalid_argument("classifier: bracket head needs K >= 2");
  }
  ClassifierModel m;
  m.arch_ = arch;
  std::vector<int> widths = {arch.input_features()};
  widths.insert(widths.end(), arch.hidden.begin(), arch.hidden.end());
  widths.push_back(arch.outputs());
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    Rng layer_rng = rng.Derive("init-layer", l);
    const int in = widths[l];
    const int out = widths[l + 1];
    // He initialisation for rectifier layers, Glorot-style for the head.
    const bool last = l + 2 == widths.size();
    const double stddev = std::sqrt((last ? 1.0 : 2.0) / in);
    const auto draws = SampleStandardNormal(layer_rng, static_cast<std::size_t>(in) * out);
    DenseLayer layer;
    layer.weights.resize(out, in);
    for (int i = 0; i < out; ++i) {
      for (int j = 0; j < in; ++j) layer.weights(i, j) = stddev * draws[static_cast<std::size_t>(i) * in + j];
    }
    layer.bias = Eigen::VectorXd::Zero(out);
    m.layers_.push_back(std::move(layer));
  }
  return m;
}

void ClassifierModel::set_normalization(const std::array<double, 3>& mean, const std::array<double, 3>& std) {
  mean_ = mean;
  std_ = std;
}

Eigen::VectorXd ClassifierModel::Features(const ImageBuffer& image) const {
  CheckImage(arch_, image);
  const int side = arch_.input_side();
  Eigen::VectorXd f(arch_.input_features());
  if (arch_.pool == 1) {
    for (std::size_t i = 0; i < image.data.size(); ++i) {
      f(static_cast<Eigen::Index>(i)) = (image.data[i] - mean_[i % 3]) / std_[i % 3];
    }
    return f;
  }
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double avg = 0.25 * (image.at(2 * y, 2 * x, c) + image.at(2 * y, 2 * x + 1, c) +
                                   image.at(2 * y + 1, 2 * x, c) + image.at(2 * y + 1, 2 * x + 1, c));
        f((static_cast<Eigen::Index>(y) * side + x) * 3 + c) = (avg - mean_[c]) / std_[c];
      }
    }
  }
  return f;
}

Eigen::MatrixXd ClassifierModel::ForwardBatch(const Eigen::MatrixXd& features) const {
  Eigen::MatrixXd h = features;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].weights * h;
    z.colwise() += layers_[l].bias;
    if (l + 1 < layers_.size()) Activate(arch_.activation, z);
    h = std::move(z);
  }
  return h;
}

Eigen::VectorXd ClassifierModel::Logits(const ImageBuffer& image) const {
  return ForwardBatch(Features(image)).col(0);
}

PixelArray ClassifierModel::LogitGradient(const ImageBuffer& image) const {
  const Eigen::VectorXd x = Features(image);
  std::vector<Eigen::VectorXd> activations = {x};
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Eigen::VectorXd z = layers_[l].weights * activations.back() + layers_[l].bias;
    if (l + 1 < layers_.size()) Activate(arch_.activation, z);
    activations.push_back(std::move(z));
  }
  // Back-propagate d logit_0.
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(layers_.back().weights.rows());
  delta(0) = 1.0;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    Eigen::VectorXd back = layers_[l].weights.transpose() * delta;
    if (l > 0) {
      back.array() *= ActivationSlope(arch_.activation, activations[l]).array();
    }
    delta = std::move(back);
  }
  PixelArray g{image.height, image.width, std::vector<double>(image.data.size(), 0.0)};
  const int side = arch_.input_side();
  if (arch_.pool == 1) {
    for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] = delta(static_cast<Eigen::Index>(i)) / std_[i % 3];
    return g;
  }
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double v = 0.25 * delta((static_cast<Eigen::Index>(y) * side + x) * 3 + c) / std_[c];
        g.data[image.index(2 * y, 2 * x, c)] = v;
        g.data[image.index(2 * y, 2 * x + 1, c)] = v;
        g.data[image.index(2 * y + 1, 2 * x, c)] = v;
        g.data[image.index(2 * y + 1, 2 * x + 1, c)] = v;
      }
    }
  }
  return g;
}

std::string ClassifierModel::Serialize() const {
  json header = {{"format_version", kFormatVersion},
                 {"image_size", arch_.image_size},
                 {"pool", arch_.pool},
                 {"hidden", arch_.hidden},
                 {"head", arch_.head == HeadKind::kBinary ? "binary" : "brackets"},
                 {"num_brackets", arch_.num_brackets},
                 {"activation", arch_.activation == Activation::kRelu ? "relu" : "softplus"}};
  std::string out = std::string(kMagic) + " " + std::to_string(kFormatVersion) + "\n" + header.dump() + "\n";
  auto put = [&out](const double* p, std::size_t n) {
    out.append(reinterpret_cast<const char*>(p), n * sizeof(double));
  };
  put(mean_.data(), 3);
  put(std_.data(), 3);
  for (const auto& l : layers_) {
    put(l.weights.data(), static_cast<std::size_t>(l.weights.size()));
    put(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
  }
  return out;
}

ClassifierModel ClassifierModel::Deserialize(const std::string& bytes) {
  const auto first = bytes.find('\n');
  const auto second = first == std::string::npos ? std::string::npos : bytes.find('\n', first + 1);
  if (second == std::string::npos || bytes.rfind(kMagic, 0) != 0) {
    throw std::runtime_error("not a classifier model file");
  }
  const json header = json::parse(bytes.substr(first + 1, second - first - 1));
  if (header.at("format_version").get<int>() != kFormatVersion) {
    throw std::runtime_error("unsupported classifier format version");
  }
  ClassifierArchitecture arch;
  arch.image_size = header.at("image_size").get<int>();
  arch.pool = header.at("pool").get<int>();
  arch.hidden = header.at("hidden").get<std::vector<int>>();
  arch.head = header.at("head").get<std::string>() == "binary" ? HeadKind::kBinary : HeadKind::kBrackets;
  arch.num_brackets = header.at("num_brackets").get<int>();
  const std::string activation = header.value("activation", "relu");
  if (activation == "relu") {
    arch.activation = Activation::kRelu;
  } else if (activation == "softplus") {
    arch.activation = Activation::kSoftplus;
  } else {
    throw std::runtime_error("unknown activation in classifier model: " + activation);
  }
  ClassifierModel m = Initialize(arch, Rng(0));
  std::size_t offset = second + 1;
  auto take = [&](double* p, std::size_t n) {
    const std::size_t len = n * sizeof(double);
    if (offset + len > bytes.size()) throw std::runtime_error("truncated classifier model file");
    std::memcpy(p, bytes.data() + offset, len);
    offset += len;
  };
  take(m.mean_.data(), 3);
  take(m.std_.data(), 3);
  for (auto& l : m.layers_) {
    take(l.weights.data(), static_cast<std::size_t>(l.weights.size()));
    take(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
  }
  if (offset != bytes.size()) throw std::runtime_error("trailing bytes in classifier model file");
  return m;
}

void ClassifierModel::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model '" + path + "'");
  const std::string bytes = Serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ClassifierModel ClassifierModel::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read model '" + path + "'");
  return Deserialize(std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>()));
}

bool operator==(const ClassifierModel& a, const ClassifierModel& b) {
  if (!(a.arch_ == b.arch_) || a.mean_ != b.mean_ || a.std_ != b.std_ || a.layers_.size() != b.layers_.size()) {
    return false;
  }
  for (std::size_t l = 0; l < a.layers_.size(); ++l) {
    if (a.layers_[l].weights != b.layers_[l].weights || a.layers_[l].bias != b.layers_[l].bias) return false;
  }
  return true;
}

EpochMetrics Evaluate(const ClassifierModel& model, const std::vector<LabeledExample>& examples) {
  EpochMetrics m;
  if (examples.empty()) return m;
  constexpr std::size_t kChunk = 256;
  double loss = 0.0;
  int hits = 0;
  for (std::size_t start = 0; start < examples.size(); start += kChunk) {
    const std::size_t end = std::min(examples.size(), start + kChunk);
    Eigen::MatrixXd x(model.architecture().input_features(), static_cast<Eigen::Index>(end - start));
    for (std::size_t i = start; i < end; ++i) x.col(static_cast<Eigen::Index>(i - start)) = model.Features(examples[i].image);
    const Eigen::MatrixXd z = model.ForwardBatch(x);
    for (std::size_t i = start; i < end; ++i) {
      const auto [l, hit] = LossAndHit(model.architecture(), z.col(static_cast<Eigen::Index>(i - start)),
                                       Target(model.architecture(), examples[i]));
      loss += l;
      hits += hit ? 1 : 0;
    }
  }
  m.val_loss = loss / static_cast<double>(examples.size());
  m.val_accuracy = static_cast<double>(hits) / static_cast<double>(examples.size());
  return m;
}

TrainResult TrainClassifier(const LabeledDataset& dataset, const TrainConfig& config, const Rng& rng) {
  if (dataset.train.empty()) throw std::invalid_argument("train: empty training split");
  if (!(config.lr > 0.0)) throw std::invalid_argument("train: lr must be > 0");
  if (config.epochs < 0 || config.batch_size < 1) throw std::invalid_argument("train: bad epochs/batch size");

  ClassifierArchitecture arch;
  arch.image_size = dataset.train.front().image.height;
  arch.pool = config.pool;
  arch.hidden = config.hidden;
  arch.head = config.head;
  arch.activation = config.activation;
  if (config.head == HeadKind::kBrackets) {
    int max_bracket = -1;
    for (const auto& ex : dataset.train) max_bracket = std::max(max_bracket, ex.bracket);
    if (max_bracket < 0) throw std::invalid_argument("train: dataset has no bracket targets");
    arch.num_brackets = max_bracket + 1;
  }

  TrainResult result;
  {
    std::vector<int> seen;
    for (const auto& ex : dataset.train) {
      const int t = Target(arch, ex);
      if (std::find(seen.begin(), seen.end(), t) == seen.end()) seen.push_back(t);
    }
    if (seen.size() < 2) {
      result.single_class = true;
      std::cerr << "warning: training split contains a single class\n";
    }
  }

  ClassifierModel model = ClassifierModel::Initialize(arch, rng.Derive("init"));
  const auto mean = ChannelMean(dataset.train);
  model.set_normalization(mean, ChannelStd(dataset.train, mean));

  const Eigen::MatrixXd x_train = FeatureMatrix(model, dataset.train);
  std::vector<int> targets;
  for (const auto& ex : dataset.train) targets.push_back(Target(arch, ex));

  auto record = [&](int epoch) {
    EpochMetrics m;
    m.epoch = epoch;
    const auto tr = Evaluate(model, dataset.train);
    m.train_loss = tr.val_loss;
    m.train_accuracy = tr.val_accuracy;
    if (!dataset.val.empty()) {
      const auto va = Evaluate(model, dataset.val);
      m.val_loss = va.val_loss;
      m.val_accuracy = va.val_accuracy;
    }
    result.epochs.push_back(m);
  };
  record(0);

  auto& layers = model.mutable_layers();
  std::vector<AdamState> w_opt;
  std::vector<AdamState> b_opt;
  for (const auto& l : layers) {
    w_opt.push_back(AdamState::Fresh(static_cast<std::size_t>(l.weights.size()), config.lr));
    b_opt.push_back(AdamState::Fresh(static_cast<std::size_t>(l.bias.size()), config.lr));
  }

  const std::size_t n = dataset.train.size();
  std::vector<std::size_t> order(n);
  const int k_out = arch.outputs();
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng = rng.Derive("shuffle", static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(config.batch_size));
      const auto b = static_cast<Eigen::Index>(end - start);
      Eigen::MatrixXd xb(x_train.rows(), b);
      for (Eigen::Index i = 0; i < b; ++i) xb.col(i) = x_train.col(static_cast<Eigen::Index>(order[start + i]));

      std::vector<Eigen::MatrixXd> acts = {xb};
      for (std::size_t l = 0; l < layers.size(); ++l) {
        Eigen::MatrixXd z = layers[l].weights * acts.back();
        z.colwise() += layers[l].bias;
        if (l + 1 < layers.size()) Activate(arch.activation, z);
        acts.push_back(std::move(z));
      }
      Eigen::MatrixXd delta(k_out, b);
      const Eigen::MatrixXd& out = acts.back();
      for (Eigen::Index i = 0; i < b; ++i) {
        const int t = targets[order[start + static_cast<std::size_t>(i)]];
        if (arch.head == HeadKind::kBinary) {
          const double p = 1.0 / (1.0 + std::exp(-out(0, i)));
          delta(0, i) = p - (t > 0 ? 1.0 : 0.0);
        } else {
          Eigen::VectorXd p = Softmax(out.col(i));
          p(t) -= 1.0;
          delta.col(i) = p;
        }
      }
      delta /= static_cast<double>(b);
      for (std::size_t l = layers.size(); l-- > 0;) {
        const Eigen::MatrixXd grad_w = delta * acts[l].transpose();
        const Eigen::VectorXd grad_b = delta.rowwise().sum();
        if (l > 0) {
          Eigen::MatrixXd back = layers[l].weights.transpose() * delta;
          back.array() *= ActivationSlope(arch.activation, acts[l]).array();
          delta = std::move(back);
        }
        w_opt[l].Apply(std::span<double>(layers[l].weights.data(), static_cast<std::size_t>(layers[l].weights.size())),
                       std::span<const double>(grad_w.data(), static_cast<std::size_t>(grad_w.size())));
        b_opt[l].Apply(std::span<double>(layers[l].bias.data(), static_cast<std::size_t>(layers[l].bias.size())),
                       std::span<const double>(grad_b.data(), static_cast<std::size_t>(grad_b.size())));
      }
    }
    record(epoch);
  }
  result.model = std::move(model);
  return result;
}

double Logit(const ClassifierModel& model, const ImageBuffer& image) {
  if (model.architecture().head != HeadKind::kBinary) {
    throw std::invalid_argument("score: model has a bracket head; use ContinuousScore");
  }
  return model.Logits(image)(0);
}

double Score(const ClassifierModel& model, const ImageBuffer& image) { return std::tanh(Logit(model, image)); }

PixelArray InputGradient(const ClassifierModel& model, const ImageBuffer& image) {
  const double t = Score(model, image);
  PixelArray g = model.LogitGradient(image);
  const double k = 1.0 - t * t;
  for (double& v : g.data) v *= k;
  return g;
}

BracketSpec BracketSpec::AgeDefaults() { return {{0.0, 3.0, 10.0}, {2.0, 9.0, 19.0}, {1.0, 6.0, 14.5}}; }

void BracketSpec::Validate() const {
  const std::size_t k = centers.size();
  if (k == 0 || lower.size() != k || upper.size() != k) throw std::invalid_argument("BracketSpec: malformed");
  for (std::size_t i = 0; i < k; ++i) {
    if (!(lower[i] <= centers[i] && centers[i] <= upper[i])) {
      throw std::invalid_argument("BracketSpec: center outside its interval");
    }
    if (i > 0 && !(centers[i - 1] < centers[i] && upper[i - 1] < lower[i])) {
      throw std::invalid_argument("BracketSpec: brackets must be ordered and disjoint");
    }
  }
}

double ContinuousScoreFromLogits(const Eigen::VectorXd& logits, const BracketSpec& brackets) {
  brackets.Validate();
  if (static_cast<std::size_t>(logits.size()) != brackets.centers.size()) {
    throw std::invalid_argument("continuous_score: head has " + std::to_string(logits.size()) + " logits but " +
                                std::to_string(brackets.centers.size()) + " brackets");
  }
  const Eigen::VectorXd p = Softmax(logits);
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) s += p(i) * brackets.centers[static_cast<std::size_t>(i)];
  return s;
}

double ContinuousScore(const ClassifierModel& model, const ImageBuffer& image, const BracketSpec& brackets) {
  if (model.architecture().head != HeadKind::kBrackets) {
    throw std::invalid_argument("continuous_score: model has a binary head");
  }
  return ContinuousScoreFromLogits(model.Logits(image), brackets);
}

Prediction PredictFromLogits(HeadKind head, const Eigen::VectorXd& logits) {
  if (head == HeadKind::kBinary) {
    const double z = logits(0);
    return {z > 0.0 ? +1 : -1, std::abs(std::tanh(z))};
  }
  Eigen::Index arg = 0;
  logits.maxCoeff(&arg);
  return {static_cast<int>(arg), Softmax(logits)(arg)};
}

Prediction PredictClass(const ClassifierModel& model, const ImageBuffer& image) {
  return PredictFromLogits(model.architecture().head, model.Logits(image));
}

}  // namespace styleprobe
