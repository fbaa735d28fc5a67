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

#include "styleprobe/attribution.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "styleprobe/image_io.h"
#include "styleprobe/rng.h"

namespace styleprobe {
namespace {

AttributionMap FromPixels(const PixelArray& p, std::string method) {
  AttributionMap m;
  m.height = p.height;
  m.width = p.width;
  m.data = p.data;
  m.method = std::move(method);
  return m;
}

}  // namespace

AttributionMap Saliency(const ClassifierModel& model, const ImageBuffer& image) {
  return FromPixels(InputGradient(model, image), "saliency");
}

AttributionMap SmoothGrad(const ClassifierModel& model, const ImageBuffer& image, int n, double sigma,
                          std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("smoothgrad: n must be >= 1");
  if (!(sigma >= 0.0)) throw std::invalid_argument("smoothgrad: sigma must be >= 0");
  AttributionMap out;
  if (sigma == 0.0) {
    out = Saliency(model, image);
  } else {
    const Rng base(seed);
    out.height = image.height;
    out.width = image.width;
    out.data.assign(image.data.size(), 0.0);
    std::normal_distribution<double> normal(0.0, sigma);
    for (int i = 0; i < n; ++i) {
      Rng rng = base.Derive("smoothgrad", static_cast<std::uint64_t>(i));
      ImageBuffer noisy = image;
      for (double& v : noisy.data) v = std::clamp(v + normal(rng), 0.0, 1.0);
      normal.reset();
      const PixelArray g = InputGradient(model, noisy);
      for (std::size_t k = 0; k < g.data.size(); ++k) out.data[k] += g.data[k];
    }
    for (double& v : out.data) v /= n;
  }
  out.method = "smoothgrad";
  out.parameters = {{"n", n}, {"sigma", sigma}, {"seed", static_cast<double>(seed)}};
  return out;
}

AttributionMap IntegratedGradients(const ImageGradientFn& grad, const ImageBuffer& image,
                                   const ImageBuffer& baseline, int steps) {
  RequireSameShape(image, baseline, "integrated_gradients");
  if (steps < 1) throw std::invalid_argument("integrated_gradients: steps must be >= 1");
  AttributionMap out;
  out.height = image.height;
  out.width = image.width;
  out.data.assign(image.data.size(), 0.0);
  out.method = "integrated_gradients";
  out.parameters = {{"steps", steps}};
  if (image.data == baseline.data) return out;
  ImageBuffer point = baseline;
  for (int k = 0; k < steps; ++k) {
    const double t = (k + 0.5) / steps;
    for (std::size_t i = 0; i < point.data.size(); ++i) {
      point.data[i] = baseline.data[i] + t * (image.data[i] - baseline.data[i]);
    }
    const std::vector<double> g = grad(point);
    if (g.size() != out.data.size()) throw std::invalid_argument("integrated_gradients: gradient size mismatch");
    // Running mean: a constant gradient comes out exactly.
    for (std::size_t i = 0; i < g.size(); ++i) out.data[i] += (g[i] - out.data[i]) / (k + 1);
  }
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= image.data[i] - baseline.data[i];
  return out;
}

AttributionMap IntegratedGradients(const ClassifierModel& model, const ImageBuffer& image,
                                   const ImageBuffer& baseline, int steps) {
  return IntegratedGradients([&model](const ImageBuffer& x) { return InputGradient(model, x).data; }, image,
                             baseline, steps);
}

AttributionMap IntegratedGradients(const ClassifierModel& model, const ImageBuffer& image, int steps) {
  return IntegratedGradients(model, image, ImageBuffer(image.height, image.width, 0.0), steps);
}

double AttributionSum(const AttributionMap& attr) {
  double s = 0.0;
  for (double v : attr.data) s += v;
  return s;
}

std::array<double, 3> HeatRamp(double t) {
  static constexpr double kStops[5][3] = {
      {0.00, 0.00, 0.00}, {0.35, 0.05, 0.50}, {0.85, 0.20, 0.20}, {1.00, 0.60, 0.00}, {1.00, 1.00, 0.75}};
  t = std::clamp(t, 0.0, 1.0);
  const double x = t * 4.0;
  const int i = std::min(3, static_cast<int>(x));
  const double f = x - i;
  std::array<double, 3> c;
  for (int k = 0; k < 3; ++k) c[k] = kStops[i][k] + f * (kStops[i + 1][k] - kStops[i][k]);
  return c;
}

ImageBuffer ToHeatmap(const AttributionMap& attr) {
  const std::size_t n = static_cast<std::size_t>(attr.height) * attr.width;
  if (attr.data.size() != n * 3) throw std::invalid_argument("to_heatmap: data does not match shape");
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = std::abs(attr.data[3 * i]) + std::abs(attr.data[3 * i + 1]) + std::abs(attr.data[3 * i + 2]);
    if (!std::isfinite(s[i])) throw std::invalid_argument("to_heatmap: non-finite attribution");
  }
  ImageBuffer out(attr.height, attr.width, 0.0);
  if (n == 0) return out;
  std::vector<double> sorted = s;
  const std::size_t rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(n)));
  std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
  const double cap = sorted[rank - 1];
  double lo = cap, hi = 0.0;
  for (double& v : s) {
    v = std::min(v, cap);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double t = hi > lo ? (s[i] - lo) / (hi - lo) : 0.0;
    const auto c = HeatRamp(t);
    for (int k = 0; k < 3; ++k) out.data[3 * i + k] = c[k];
  }
  return out;
}

std::string AttributionToJson(const AttributionMap& attr) {
  nlohmann::json j;
  j["method"] = attr.method;
  j["parameters"] = attr.parameters;
  j["height"] = attr.height;
  j["width"] = attr.width;
  j["channels"] = 3;
  j["data"] = attr.data;
  return j.dump();
}

void ExportAttribution(const AttributionMap& attr, const std::string& stem) {
  WritePng(stem + ".png", ToHeatmap(attr));
  std::ofstream out(stem + ".json");
  if (!out) throw std::runtime_error("export_attribution: cannot write " + stem + ".json");
  out << AttributionToJson(attr) << "\n";
}

}  // namespace styleprobe
