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

#include "styleprobe/style.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace styleprobe {

bool StyleVector::InOpenCube() const {
  for (const double v : values) {
    if (!(std::abs(v) < 1.0)) return false;
  }
  return true;
}

StyleVector Interpolate(const StyleVector& a, const StyleVector& b, double alpha) {
  if (a.size() != b.size()) throw std::invalid_argument("Interpolate: style dimension mismatch");
  if (alpha == 1.0) return b;
  StyleVector out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = a.values[i] + alpha * (b.values[i] - a.values[i]);
  }
  return out;
}

StyleVector EffectiveStyle(const LayerStyle& layer) {
  if (const auto* single = std::get_if<SingleStyle>(&layer)) return single->style;
  const auto& blend = std::get<BlendStyle>(layer);
  return Interpolate(blend.a, blend.b, blend.alpha);
}

LayerAssignment LayerAssignment::Uniform(const StyleVector& w, int num_layers) {
  LayerAssignment out;
  out.layers.assign(static_cast<std::size_t>(num_layers), SingleStyle{w});
  return out;
}

void LayerAssignment::Validate(int num_layers, int style_dim) const {
  if (static_cast<int>(layers.size()) != num_layers) {
    throw std::invalid_argument("LayerAssignment: expected " + std::to_string(num_layers) +
                                " layers, got " + std::to_string(layers.size()));
  }
  auto check_style = [style_dim](const StyleVector& s) {
    if (static_cast<int>(s.size()) != style_dim) {
      throw std::invalid_argument("LayerAssignment: style dimension mismatch");
    }
    if (!s.InOpenCube()) {
      throw std::invalid_argument("LayerAssignment: style component outside (-1,1)");
    }
  };
  for (const auto& layer : layers) {
    if (const auto* single = std::get_if<SingleStyle>(&layer)) {
      check_style(single->style);
    } else {
      const auto& blend = std::get<BlendStyle>(layer);
      check_style(blend.a);
      check_style(blend.b);
      if (!(blend.alpha >= 0.0 && blend.alpha <= 1.0)) {
        throw std::invalid_argument("LayerAssignment: alpha outside [0,1]");
      }
    }
  }
}

LayerGrouping::LayerGrouping(std::vector<int> sizes, std::vector<std::string> names)
    : sizes_(std::move(sizes)), names_(std::move(names)) {
  if (sizes_.empty()) throw std::invalid_argument("LayerGrouping: no groups");
  for (const int s : sizes_) {
    if (s <= 0) throw std::invalid_argument("LayerGrouping: empty group");
  }
  if (!names_.empty() && names_.size() != sizes_.size()) {
    throw std::invalid_argument("LayerGrouping: names/sizes length mismatch");
  }
  if (names_.empty()) {
    for (std::size_t g = 0; g < sizes_.size(); ++g) names_.push_back("group" + std::to_string(g + 1));
  }
}

int LayerGrouping::num_layers() const {
  return std::accumulate(sizes_.begin(), sizes_.end(), 0);
}

int LayerGrouping::first_layer(int group) const {
  return std::accumulate(sizes_.begin(), sizes_.begin() + group, 0);
}

int LayerGrouping::last_layer(int group) const {
  return first_layer(group) + sizes_.at(group) - 1;
}

int LayerGrouping::group_of_layer(int layer) const {
  int acc = 0;
  for (int g = 0; g < num_groups(); ++g) {
    acc += sizes_[g];
    if (layer < acc) return g;
  }
  throw std::out_of_range("LayerGrouping: layer out of range");
}

LayerAssignment LayerGrouping::Expand(const std::vector<LayerStyle>& per_group) const {
  if (static_cast<int>(per_group.size()) != num_groups()) {
    throw std::invalid_argument("LayerGrouping::Expand: expected " + std::to_string(num_groups()) +
                                " groups, got " + std::to_string(per_group.size()));
  }
  LayerAssignment out;
  for (int g = 0; g < num_groups(); ++g) {
    for (int i = 0; i < sizes_[g]; ++i) out.layers.push_back(per_group[g]);
  }
  return out;
}

}  // namespace styleprobe
