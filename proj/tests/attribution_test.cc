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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "styleprobe/attribution.h"
#include "styleprobe/classifier.h"
#include "styleprobe/config.h"
#include "styleprobe/dataset.h"
#include "styleprobe/image_io.h"

namespace styleprobe {
namespace {

const LabeledDataset& Faces() {
  static const LabeledDataset d = MakeDataset(DefaultConfig(), "toy-faces", 1024, 64, 0.0, Rng(61));
  return d;
}

const ClassifierModel& Model() {
  static const ClassifierModel m = [] {
    TrainConfig tc;
    tc.epochs = 6;
    tc.lr = 1e-3;
    return TrainClassifier(Faces(), tc, Rng(62)).model;
  }();
  return m;
}

const ImageBuffer& Image() { return Faces().val[3].image; }

TEST_CASE("saliency is the input gradient") {
  const AttributionMap s = Saliency(Model(), Image());
  CHECK(s.data == InputGradient(Model(), Image()).data);
  CHECK(s.height == 64);
  CHECK(s.width == 64);
  CHECK(s.method == "saliency");

  ClassifierModel zero = Model();
  for (auto& l : zero.mutable_layers()) l.weights.setZero();
  for (double v : Saliency(zero, Image()).data) CHECK(v == 0.0);
  CHECK_THROWS_AS(Saliency(Model(), ImageBuffer(8, 8)), std::invalid_argument);
}

TEST_CASE("smoothgrad with zero noise is saliency bit-exactly") {
  for (int n : {1, 5, 25}) CHECK(SmoothGrad(Model(), Image(), n, 0.0).data == Saliency(Model(), Image()).data);
  CHECK_THROWS_AS(SmoothGrad(Model(), Image(), 0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(SmoothGrad(Model(), Image(), 5, -0.1), std::invalid_argument);
}

TEST_CASE("smoothgrad with one sample is the saliency of that noisy copy") {
  Rng rng = Rng(9).Derive("smoothgrad", 0);
  std::normal_distribution<double> normal(0.0, 0.1);
  ImageBuffer noisy = Image();
  for (double& v : noisy.data) v = std::clamp(v + normal(rng), 0.0, 1.0);
  CHECK(SmoothGrad(Model(), Image(), 1, 0.1, 9).data == Saliency(Model(), noisy).data);
  CHECK(SmoothGrad(Model(), Image(), 4, 0.1, 9).data == SmoothGrad(Model(), Image(), 4, 0.1, 9).data);
}

TEST_CASE("smoothgrad estimator variance falls from n = 25 to n = 100") {
  auto spread = [](int n) {
    std::vector<std::vector<double>> maps;
    for (std::uint64_t seed = 0; seed < 6; ++seed) maps.push_back(SmoothGrad(Model(), Image(), n, 0.1, seed).data);
    double total = 0.0;
    for (std::size_t k = 0; k < maps[0].size(); ++k) {
      double mean = 0.0;
      for (const auto& m : maps) mean += m[k];
      mean /= static_cast<double>(maps.size());
      for (const auto& m : maps) total += (m[k] - mean) * (m[k] - mean);
    }
    return total;
  };
  CHECK(spread(100) < spread(25));
}

TEST_CASE("integrated gradients is exact for a linear function") {
  Rng rng(63);
  const ImageBuffer& x = Image();
  ImageBuffer x0(64, 64);
  for (double& v : x0.data) v = SampleUniform(rng, 0.0, 1.0);
  std::vector<double> c(x.data.size());
  for (double& v : c) v = SampleUniform(rng, -1.0, 1.0);
  const ImageGradientFn grad = [&](const ImageBuffer&) { return c; };
  for (int steps : {1, 7, 128}) {
    const AttributionMap ig = IntegratedGradients(grad, x, x0, steps);
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(ig.data[k] == c[k] * (x.data[k] - x0.data[k]));
  }
}

TEST_CASE("integrated gradients satisfies completeness") {
  const ImageBuffer black(64, 64, 0.0);
  const double f0 = Score(Model(), black);
  for (std::size_t i = 0; i < 10; ++i) {
    const ImageBuffer& x = Faces().val[i].image;
    const AttributionMap ig = IntegratedGradients(Model(), x);
    const double delta = Score(Model(), x) - f0;
    CHECK(std::abs(AttributionSum(ig) - delta) <= 0.01 * std::abs(delta) + 1e-4);
    CHECK(ig.parameters.at("steps") == 128);
  }
}

TEST_CASE("integrated gradients edge cases") {
  for (double v : IntegratedGradients(Model(), Image(), Image()).data) CHECK(v == 0.0);
  CHECK_THROWS_AS(IntegratedGradients(Model(), Image(), ImageBuffer(32, 32)), std::invalid_argument);
  CHECK_THROWS_AS(IntegratedGradients(Model(), Image(), 0), std::invalid_argument);
}

TEST_CASE("heat ramp stops") {
  CHECK(HeatRamp(0.0) == std::array<double, 3>{0.0, 0.0, 0.0});
  CHECK(HeatRamp(0.5) == std::array<double, 3>{0.85, 0.2, 0.2});
  CHECK(HeatRamp(1.0) == std::array<double, 3>{1.0, 1.0, 0.75});
  const auto mid = HeatRamp(0.125);
  CHECK(mid[0] == doctest::Approx(0.175));
  CHECK(HeatRamp(-3.0) == HeatRamp(0.0));
  CHECK(HeatRamp(7.0) == HeatRamp(1.0));
}

TEST_CASE("heat map normalization") {
  AttributionMap zero;
  zero.height = 64;
  zero.width = 64;
  zero.data.assign(64 * 64 * 3, 0.0);
  const ImageBuffer z = ToHeatmap(zero);
  for (double v : z.data) CHECK(v == 0.0);

  const AttributionMap s = Saliency(Model(), Image());
  AttributionMap scaled = s;
  for (double& v : scaled.data) v *= 10.0;
  const ImageBuffer h = ToHeatmap(s);
  const ImageBuffer h10 = ToHeatmap(scaled);
  double worst = 0.0;
  for (std::size_t i = 0; i < h.data.size(); ++i) worst = std::max(worst, std::abs(h.data[i] - h10.data[i]));
  CHECK(worst < 1e-12);
  const auto [lo, hi] = std::minmax_element(h.data.begin(), h.data.end());
  CHECK(*lo >= 0.0);
  CHECK(*hi <= 1.0);
  // The 99th percentile clip saturates about 1% of pixels at the top stop.
  int top = 0;
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) top += h.at(y, x, 2) == 0.75 ? 1 : 0;
  }
  CHECK(top >= 41);
  CHECK(top <= 60);
}

TEST_CASE("attribution export") {
  const AttributionMap s = SmoothGrad(Model(), Image(), 3, 0.05, 1);
  const auto j = nlohmann::json::parse(AttributionToJson(s));
  CHECK(j.at("method") == "smoothgrad");
  CHECK(j.at("parameters").at("n") == 3);
  CHECK(j.at("data").size() == s.data.size());
  const auto stem = (std::filesystem::temp_directory_path() / "styleprobe_attr_test").string();
  ExportAttribution(s, stem);
  CHECK(ReadPng(stem + ".png") == Quantize8(ToHeatmap(s)));
  std::filesystem::remove(stem + ".png");
  std::filesystem::remove(stem + ".json");
}

}  // namespace
}  // namespace styleprobe
