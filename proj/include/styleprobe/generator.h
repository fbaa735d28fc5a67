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

#ifndef STYLEPROBE_GENERATOR_H_
#define STYLEPROBE_GENERATOR_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "styleprobe/config.h"
#include "styleprobe/image.h"
#include "styleprobe/render.h"
#include "styleprobe/rng.h"
#include "styleprobe/scene.h"
#include "styleprobe/style.h"

namespace styleprobe {

// w = tanh(A z) with A a fixed orthogonal matrix drawn from the mapping seed.
class StyleMapping {
 public:
  StyleMapping(int dim, std::uint64_t seed);

  int dim() const { return static_cast<int>(matrix_.rows()); }
  // Throws std::invalid_argument on a dimension mismatch.
  StyleVector Map(const LatentCode& z) const;
  // Throws std::invalid_argument unless every |w_i| < 1.
  LatentCode Unmap(const StyleVector& w) const;
  const Eigen::MatrixXd& matrix() const { return matrix_; }

 private:
  Eigen::MatrixXd matrix_;
};

// Procedural style-based generator: mapping network, per-layer style decode
// and the differentiable renderer. Immutable after construction.
class Generator {
 public:
  explicit Generator(WorkbenchConfig config);

  const WorkbenchConfig& config() const { return config_; }
  const GeneratorGeometry& geometry() const { return config_.geometry; }
  int num_layers() const { return config_.geometry.num_layers; }
  int style_dim() const { return config_.geometry.style_dim; }
  int image_size() const { return config_.geometry.image_size; }
  const SceneSpec& scenario(const std::string& id) const { return config_.Scenario(id); }
  const StyleMapping& mapping() const { return mapping_; }

  StyleVector MapLatent(const LatentCode& z) const { return mapping_.Map(z); }
  LatentCode UnmapLatent(const StyleVector& w) const { return mapping_.Unmap(w); }
  StyleVector RandomStyle(Rng& rng) const;

  // Validates the assignment and decodes it against the scenario table.
  SceneParams Decode(const LayerAssignment& assignment, const std::string& scenario_id) const;

  ImageBuffer Synthesize(const LayerAssignment& assignment, const std::string& scenario_id) const;
  ImageBuffer SynthesizeStyle(const StyleVector& w, const std::string& scenario_id) const;
  ImageBuffer SynthesizeFromZ(const LatentCode& z, const std::string& scenario_id) const;
  ImageBuffer Render(const SceneParams& params, const std::string& scenario_id) const;

  // d image / d attribute for every attribute of the scenario.
  RenderJacobian Jacobian(const LayerAssignment& assignment, const std::string& scenario_id) const;

 private:
  WorkbenchConfig config_;
  StyleMapping mapping_;
};

}  // namespace styleprobe

#endif  // STYLEPROBE_GENERATOR_H_
