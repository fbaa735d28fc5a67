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

#include "styleprobe/generator.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace styleprobe {

StyleMapping::StyleMapping(int dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("StyleMapping: dim must be >= 1");
  Rng rng = Rng(seed).Derive("mapping");
  const auto draws = SampleStandardNormal(rng, static_cast<std::size_t>(dim) * dim);
  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) g(i, j) = draws[static_cast<std::size_t>(i) * dim + j];
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
  // Fix column signs so Q is unique given the draw (R with positive diagonal).
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  matrix_ = q;
}

StyleVector StyleMapping::Map(const LatentCode& z) const {
  if (static_cast<int>(z.values.size()) != dim()) {
    throw std::invalid_argument("map_latent: expected latent of length " + std::to_string(dim()));
  }
  for (double v : z.values) {
    if (!std::isfinite(v)) throw std::invalid_argument("map_latent: latent entries must be finite");
  }
  const Eigen::Map<const Eigen::VectorXd> zv(z.values.data(), dim());
  const Eigen::VectorXd pre = matrix_ * zv;
  StyleVector w;
  w.values.resize(static_cast<std::size_t>(dim()));
  // tanh rounds to +-1 beyond |x| ~ 19; keep the result inside the open cube.
  const double edge = std::nextafter(1.0, 0.0);
  for (int i = 0; i < dim(); ++i) {
    w.values[static_cast<std::size_t>(i)] = std::clamp(std::tanh(pre(i)), -edge, edge);
  }
  return w;
}

LatentCode StyleMapping::Unmap(const StyleVector& w) const {
  if (static_cast<int>(w.values.size()) != dim()) {
    throw std::invalid_argument("unmap_latent: expected style of length " + std::to_string(dim()));
  }
  Eigen::VectorXd pre(dim());
  for (int i = 0; i < dim(); ++i) {
    const double v = w.values[static_cast<std::size_t>(i)];
    if (!(std::abs(v) < 1.0)) {
      throw std::invalid_argument("unmap_latent: style component outside (-1,1)");
    }
    pre(i) = std::atanh(v);
  }
  const Eigen::VectorXd z = matrix_.transpose() * pre;
  return LatentCode{std::vector<double>(z.data(), z.data() + z.size())};
}

Generator::Generator(WorkbenchConfig config)
    : config_(std::move(config)),
      mapping_(config_.geometry.style_dim, config_.geometry.mapping_seed) {
  config_.Validate();
}

StyleVector Generator::RandomStyle(Rng& rng) const {
  return MapLatent(LatentCode{SampleStandardNormal(rng, static_cast<std::size_t>(geometry().latent_dim))});
}

SceneParams Generator::Decode(const LayerAssignment& assignment, const std::string& scenario_id) const {
  assignment.Validate(num_layers(), style_dim());
  return DecodeStyles(scenario(scenario_id), assignment);
}

ImageBuffer Generator::Synthesize(const LayerAssignment& assignment, const std::string& scenario_id) const {
  return Render(Decode(assignment, scenario_id), scenario_id);
}

ImageBuffer Generator::SynthesizeStyle(const StyleVector& w, const std::string& scenario_id) const {
  return Synthesize(LayerAssignment::Uniform(w, num_layers()), scenario_id);
}

ImageBuffer Generator::SynthesizeFromZ(const LatentCode& z, const std::string& scenario_id) const {
  return SynthesizeStyle(MapLatent(z), scenario_id);
}

ImageBuffer Generator::Render(const SceneParams& params, const std::string& scenario_id) const {
  return RenderScene(scenario(scenario_id), params, image_size());
}

RenderJacobian Generator::Jacobian(const LayerAssignment& assignment, const std::string& scenario_id) const {
  return RenderSceneJacobian(scenario(scenario_id), Decode(assignment, scenario_id), image_size());
}

}  // namespace styleprobe
