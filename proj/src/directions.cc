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

#include "styleprobe/directions.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

#include "styleprobe/adam.h"
#include "styleprobe/image_io.h"

namespace styleprobe {
namespace {

constexpr double kClampEdge = 1.0 - 1e-6;

double Sigmoid(double x) { return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

double Accuracy(const std::vector<double>& params, const std::vector<StyleVector>& xs, const std::vector<int>& ys) {
  if (xs.empty()) return 0.0;
  const std::size_t d = params.size() - 1;
  int correct = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double s = params[d];
    for (std::size_t k = 0; k < d; ++k) s += params[k] * xs[i].values[k];
    const int pred = s > 0.0 ? 1 : -1;
    correct += pred == ys[i];
  }
  return static_cast<double>(correct) / static_cast<double>(xs.size());
}

void CheckSplit(const std::vector<StyleVector>& xs, const std::vector<int>& ys, std::size_t dim, const char* name) {
  if (xs.size() != ys.size()) throw std::invalid_argument(std::string("fit_direction: ") + name + " sizes differ");
  for (const auto& x : xs) {
    if (x.values.size() != dim) throw std::invalid_argument("fit_direction: inconsistent style dimension");
  }
  for (int y : ys) {
    if (y != 1 && y != -1) throw std::invalid_argument("fit_direction: labels must be -1 or +1");
  }
}

}  // namespace

const std::vector<double>& DefaultSweepLambdas() {
  static const std::vector<double> kLambdas = {-0.09, -0.06, -0.03, 0.03, 0.06, 0.09};
  return kLambdas;
}

int LatentLabel(const Generator& gen, const ClassifierModel& model, const std::string& scenario,
                const StyleVector& w) {
  return Score(model, gen.SynthesizeStyle(w, scenario)) > 0.0 ? 1 : -1;
}

LatentDataset SampleLatentDataset(const Generator& gen, const ClassifierModel& model, const std::string& scenario,
                                  int n_train, int n_val, const Rng& rng) {
  if (n_train < 1 || n_val < 1) throw std::invalid_argument("sample_latent_dataset: counts must be >= 1");
  LatentDataset out;
  auto fill = [&](int n, const char* label, std::vector<StyleVector>& ws, std::vector<int>& ys) {
    ws.reserve(n);
    ys.reserve(n);
    for (int i = 0; i < n; ++i) {
      Rng r = rng.Derive(label, static_cast<std::uint64_t>(i));
      StyleVector w = gen.RandomStyle(r);
      ys.push_back(LatentLabel(gen, model, scenario, w));
      ws.push_back(std::move(w));
    }
  };
  fill(n_train, "latent-train", out.train_w, out.train_y);
  fill(n_val, "latent-val", out.val_w, out.val_y);
  return out;
}

DirectionModel FitDirection(const LatentDataset& data, const DirectionFitConfig& cfg, const std::string& attribute) {
  if (data.train_w.empty()) throw std::invalid_argument("fit_direction: empty training split");
  const std::size_t d = data.train_w.front().values.size();
  if (d == 0) throw std::invalid_argument("fit_direction: empty style vectors");
  CheckSplit(data.train_w, data.train_y, d, "train");
  CheckSplit(data.val_w, data.val_y, d, "val");
  const bool has_pos = std::count(data.train_y.begin(), data.train_y.end(), 1) > 0;
  const bool has_neg = std::count(data.train_y.begin(), data.train_y.end(), -1) > 0;
  if (!has_pos || !has_neg) throw std::invalid_argument("fit_direction: training labels contain a single class");
  if (cfg.batch_size < 1 || cfg.max_epochs < 1 || cfg.patience < 1 || !(cfg.lr > 0.0)) {
    throw std::invalid_argument("fit_direction: invalid fit configuration");
  }

  // Evaluation split for early stopping: validation when present.
  const auto& eval_w = data.val_w.empty() ? data.train_w : data.val_w;
  const auto& eval_y = data.val_w.empty() ? data.train_y : data.val_y;

  std::vector<double> params(d + 1, 0.0);  // weights then bias
  AdamState opt = AdamState::Fresh(params.size(), cfg.lr);
  std::vector<std::size_t> order(data.train_w.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng(cfg.seed).Derive("direction-shuffle");

  std::vector<double> best = params;
  double best_acc = -1.0;
  int best_epoch = 0;
  int since_best = 0;
  int epoch = 0;
  std::vector<double> grad(params.size());
  while (epoch < cfg.max_epochs && since_best < cfg.patience) {
    ++epoch;
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t b = start; b < end; ++b) {
        const auto& x = data.train_w[order[b]].values;
        const double y = data.train_y[order[b]];
        double s = params[d];
        for (std::size_t k = 0; k < d; ++k) s += params[k] * x[k];
        // d/ds of log(1 + exp(-y s))
        const double g = -y * Sigmoid(-y * s);
        for (std::size_t k = 0; k < d; ++k) grad[k] += g * x[k];
        grad[d] += g;
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      for (double& g : grad) g *= inv;
      opt.Apply(params, grad);
    }
    const double acc = Accuracy(params, eval_w, eval_y);
    if (acc > best_acc) {
      best_acc = acc;
      best = params;
      best_epoch = epoch;
      since_best = 0;
    } else {
      ++since_best;
    }
  }

  double norm = 0.0;
  for (std::size_t k = 0; k < d; ++k) norm += best[k] * best[k];
  norm = std::sqrt(norm);
  if (!(norm > 0.0)) throw std::runtime_error("fit_direction: fitted weight vector vanished");
  DirectionModel model;
  model.u.resize(d);
  for (std::size_t k = 0; k < d; ++k) model.u[k] = best[k] / norm;
  model.bias = best[d] / norm;
  model.attribute = attribute;
  model.train_accuracy = Accuracy(best, data.train_w, data.train_y);
  model.val_accuracy = data.val_w.empty() ? model.train_accuracy : best_acc;
  model.epochs = best_epoch;
  return model;
}

AppliedDirection ApplyDirection(const StyleVector& w, const DirectionModel& dir, double lambda) {
  if (w.values.size() != dir.u.size()) throw std::invalid_argument("apply_direction: dimension mismatch");
  AppliedDirection out;
  out.w.values.resize(w.values.size());
  for (std::size_t k = 0; k < w.values.size(); ++k) {
    double v = w.values[k] + lambda * dir.u[k];
    if (!(v > -1.0 && v < 1.0)) {
      v = std::clamp(v, -kClampEdge, kClampEdge);
      out.clamped = true;
    }
    out.w.values[k] = v;
  }
  return out;
}

SweepResult Sweep(const Generator& gen, const StyleVector& w, const DirectionModel& dir,
                  std::vector<double> lambdas, const ClassifierModel& model, const std::string& scenario) {
  if (lambdas.empty()) throw std::invalid_argument("sweep: lambdas must be non-empty");
  std::stable_sort(lambdas.begin(), lambdas.end());
  SweepResult out;
  for (double lambda : lambdas) {
    SweepEntry e;
    e.lambda = lambda;
    if (lambda == 0.0) {
      e.w = w;
    } else {
      AppliedDirection applied = ApplyDirection(w, dir, lambda);
      e.w = std::move(applied.w);
      e.clamped = applied.clamped;
    }
    e.image = gen.SynthesizeStyle(e.w, scenario);
    e.score = Score(model, e.image);
    out.entries.push_back(std::move(e));
  }
  return out;
}

void ExportSweep(const SweepResult& sweep, const std::string& stem) {
  std::vector<ImageBuffer> images;
  nlohmann::json table;
  table["lambda"] = nlohmann::json::array();
  table["score"] = nlohmann::json::array();
  table["clamped"] = nlohmann::json::array();
  for (const auto& e : sweep.entries) {
    images.push_back(e.image);
    table["lambda"].push_back(e.lambda);
    table["score"].push_back(e.score);
    table["clamped"].push_back(e.clamped);
  }
  WritePng(stem + ".png", ImageStrip(images));
  std::ofstream out(stem + ".json");
  if (!out) throw std::runtime_error("export_sweep: cannot write " + stem + ".json");
  out << table.dump(2) << "\n";
}

void DirectionModel::Save(const std::string& path) const {
  nlohmann::json j;
  j["format"] = "styleprobe-direction";
  j["version"] = 1;
  j["u"] = u;
  j["bias"] = bias;
  j["attribute"] = attribute;
  j["train_accuracy"] = train_accuracy;
  j["val_accuracy"] = val_accuracy;
  j["epochs"] = epochs;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("direction: cannot write " + path);
  out << j.dump() << "\n";
}

DirectionModel DirectionModel::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("direction: cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("direction: malformed file " + path + ": " + e.what());
  }
  if (j.value("format", "") != "styleprobe-direction" || j.value("version", 0) != 1) {
    throw std::runtime_error("direction: unsupported format in " + path);
  }
  DirectionModel m;
  m.u = j.at("u").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  m.attribute = j.value("attribute", "");
  m.train_accuracy = j.value("train_accuracy", 0.0);
  m.val_accuracy = j.value("val_accuracy", 0.0);
  m.epochs = j.value("epochs", 0);
  return m;
}

double Cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

}  // namespace styleprobe
