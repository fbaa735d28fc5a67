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

#ifndef STYLEPROBE_RENDER_H_
#define STYLEPROBE_RENDER_H_

#include <string>
#include <vector>

#include "styleprobe/image.h"
#include "styleprobe/scene.h"

namespace styleprobe {

// Edge softness of every shape mask, in pixels.
inline constexpr double kMaskSoftness = 1.5;
// Upper bound on attributes per scene (tangent width of the Jacobian pass).
inline constexpr int kMaxSceneAttributes = 16;

// Renders a scene. Shapes are composited with soft signed-distance masks
// (quintic smoothstep), so the image is C2 in every attribute.
ImageBuffer RenderScene(const SceneSpec& spec, const SceneParams& params, int size);

struct RenderJacobian {
  ImageBuffer image;
  // d_attribute[a][i]: derivative of image.data[i] w.r.t. attribute a.
  std::vector<std::vector<double>> d_attribute;
};

// Geometric coverage of every shape (mask value before colour and opacity),
// one size*size plane per shape. Shapes skipped by the renderer's culling
// read 0.
struct CoverageMaps {
  std::vector<std::string> names;
  std::vector<std::vector<double>> masks;
};
CoverageMaps RenderCoverage(const SceneSpec& spec, const SceneParams& params, int size);

// Image plus exact per-attribute derivatives (forward-mode differentiation of
// the same kernels RenderScene uses).
RenderJacobian RenderSceneJacobian(const SceneSpec& spec, const SceneParams& params, int size);

}  // namespace styleprobe

#endif  // STYLEPROBE_RENDER_H_
