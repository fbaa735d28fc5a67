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

#ifndef STYLEPROBE_ATTRIBUTION_H_
#define STYLEPROBE_ATTRIBUTION_H_

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "styleprobe/classifier.h"
#include "styleprobe/image.h"

namespace styleprobe {

struct AttributionMap {
  int height = 0;
  int width = 0;
  std::vector<double> data;  // HWC, same layout as ImageBuffer
  std::string method;
  std::map<std::string, double> parameters;
};

// Gradient of a scalar function of the image, HWC layout.
using ImageGradientFn = std::function<std::vector<double>(const ImageBuffer&)>;

// Input gradient of the classifier score.
AttributionMap Saliency(const ClassifierModel& model, const ImageBuffer& image);

// Mean saliency over n copies perturbed by N(0, sigma^2) pixel noise, each
// clipped to [0, 1]. Copy i draws from Rng(seed).Derive("smoothgrad", i).
// sigma == 0 returns the saliency map itself. Throws std::invalid_argument
// when n < 1 or sigma < 0.
AttributionMap SmoothGrad(const ClassifierModel& model, const ImageBuffer& image, int n = 25, double sigma = 0.1,
                          std::uint64_t seed = 0);

// (x - x0) * mean of grad f(x0 + t (x - x0)) over midpoints t = (k + 0.5) / steps.
// Throws std::invalid_argument on a shape mismatch or steps < 1.
AttributionMap IntegratedGradients(const ImageGradientFn& grad, const ImageBuffer& image,
                                   const ImageBuffer& baseline, int steps = 128);
AttributionMap IntegratedGradients(const ClassifierModel& model, const ImageBuffer& image,
                                   const ImageBuffer& baseline, int steps = 128);
// All-zero baseline.
AttributionMap IntegratedGradients(const ClassifierModel& model, const ImageBuffer& image, int steps = 128);

double AttributionSum(const AttributionMap& attr);

// Heat-map colour ramp, piecewise linear in t over five equally spaced stops:
//   t=0     (0.00, 0.00, 0.00)  black
//   t=0.25  (0.35, 0.05, 0.50)  purple
//   t=0.5   (0.85, 0.20, 0.20)  red
//   t=0.75  (1.00, 0.60, 0.00)  orange
//   t=1     (1.00, 1.00, 0.75)  pale yellow
std::array<double, 3> HeatRamp(double t);

// Channel-summed absolute attribution, clipped at its 99th percentile
// (nearest rank), min-max scaled to [0, 1] (all zeros when constant) and
// coloured with HeatRamp.
ImageBuffer ToHeatmap(const AttributionMap& attr);

// {"method", "parameters", "height", "width", "channels", "data"} as JSON.
std::string AttributionToJson(const AttributionMap& attr);
void ExportAttribution(const AttributionMap& attr, const std::string& stem);

}  // namespace styleprobe

#endif  // STYLEPROBE_ATTRIBUTION_H_
