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

#include "styleprobe/scene.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace styleprobe {

int SceneSpec::AttributeIndex(const std::string& name) const {
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (attributes[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

const AttributeSpec& SceneSpec::Attribute(const std::string& name) const {
  const int i = AttributeIndex(name);
  if (i < 0) throw std::invalid_argument("scene '" + id + "' has no attribute '" + name + "'");
  return attributes[static_cast<std::size_t>(i)];
}

void SceneSpec::Validate(int num_layers, int style_dim) const {
  if (id.empty()) throw std::invalid_argument("scene id is empty");
  std::set<std::string> names;
  std::set<int> components;
  for (const auto& a : attributes) {
    if (!names.insert(a.name).second) {
      throw std::invalid_argument("scene '" + id + "': duplicate attribute '" + a.name + "'");
    }
    if (a.layer < 0 || a.layer >= num_layers) {
      throw std::invalid_argument("scene '" + id + "': attribute '" + a.name + "' has layer out of range");
    }
    if (a.component < 0 || a.component >= style_dim) {
      throw std::invalid_argument("scene '" + id + "': attribute '" + a.name +
                                  "' has component out of range");
    }
    if (!components.insert(a.component).second) {
      throw std::invalid_argument("scene '" + id + "': style component " +
                                  std::to_string(a.component) + " used twice");
    }
    if (!(a.min < a.max)) {
      throw std::invalid_argument("scene '" + id + "': attribute '" + a.name + "' has empty range");
    }
  }
  for (const auto& c : label_clauses) {
    if (AttributeIndex(c.attribute) < 0) {
      throw std::invalid_argument("scene '" + id + "': label rule references unknown attribute '" +
                                  c.attribute + "'");
    }
    if (c.op != "<" && c.op != ">") {
      throw std::invalid_argument("scene '" + id + "': label op must be '<' or '>'");
    }
  }
  if (label_clauses.empty()) throw std::invalid_argument("scene '" + id + "': no label rule");
  if (confounder && AttributeIndex(*confounder) < 0) {
    throw std::invalid_argument("scene '" + id + "': unknown confounder '" + *confounder + "'");
  }
  if (brackets) {
    const auto& b = *brackets;
    if (AttributeIndex(b.attribute) < 0) {
      throw std::invalid_argument("scene '" + id + "': bracket rule references unknown attribute");
    }
    const std::size_t k = b.centers.size();
    if (k < 2 || b.lower_bounds.size() != k || b.upper_bounds.size() != k) {
      throw std::invalid_argument("scene '" + id + "': malformed bracket rule");
    }
    for (std::size_t i = 0; i < k; ++i) {
      if (!(b.lower_bounds[i] <= b.centers[i] && b.centers[i] <= b.upper_bounds[i])) {
        throw std::invalid_argument("scene '" + id + "': bracket center outside its interval");
      }
      if (i > 0 && !(b.centers[i - 1] < b.centers[i] && b.upper_bounds[i - 1] < b.lower_bounds[i])) {
        throw std::invalid_argument("scene '" + id + "': brackets must be ordered and disjoint");
      }
    }
  }
}

double AttributeFromStyle(const AttributeSpec& attr, double w) {
  const double t = 0.5 * (w + 1.0);
  return attr.min + (attr.max - attr.min) * t * t * (3.0 - 2.0 * t);
}

double AttributeStyleDerivative(const AttributeSpec& attr, double w) {
  const double t = 0.5 * (w + 1.0);
  return (attr.max - attr.min) * 3.0 * t * (1.0 - t);
}

double StyleFromAttribute(const AttributeSpec& attr, double value) {
  const double y = (value - attr.min) / (attr.max - attr.min);
  if (!(y > 0.0 && y < 1.0)) {
    throw std::invalid_argument("StyleFromAttribute: '" + attr.name + "' value outside open range");
  }
  // Inverse of 3t^2 - 2t^3 on [0,1].
  const double t = 0.5 - std::sin(std::asin(1.0 - 2.0 * y) / 3.0);
  return 2.0 * t - 1.0;
}

SceneParams DecodeStyles(const SceneSpec& spec, const LayerAssignment& assignment) {
  std::vector<StyleVector> effective;
  effective.reserve(assignment.layers.size());
  for (const auto& layer : assignment.layers) effective.push_back(EffectiveStyle(layer));
  SceneParams out;
  out.values.reserve(spec.attributes.size());
  for (const auto& a : spec.attributes) {
    const auto& w = effective.at(static_cast<std::size_t>(a.layer));
    out.values.push_back(AttributeFromStyle(a, w.values.at(static_cast<std::size_t>(a.component))));
  }
  return out;
}

SceneParams DecodeStyle(const SceneSpec& spec, const StyleVector& w) {
  SceneParams out;
  for (const auto& a : spec.attributes) {
    out.values.push_back(AttributeFromStyle(a, w.values.at(static_cast<std::size_t>(a.component))));
  }
  return out;
}

int LabelOf(const SceneSpec& spec, const SceneParams& params) {
  for (const auto& c : spec.label_clauses) {
    const double v = params.values.at(static_cast<std::size_t>(spec.AttributeIndex(c.attribute)));
    const bool holds = c.op == "<" ? v < c.threshold : v > c.threshold;
    if (!holds) return -1;
  }
  return +1;
}

double BracketValue(const SceneSpec& spec, const SceneParams& params) {
  if (!spec.brackets) throw std::invalid_argument("scene '" + spec.id + "' has no bracket rule");
  const auto& b = *spec.brackets;
  const auto& a = spec.Attribute(b.attribute);
  const double v = params.values.at(static_cast<std::size_t>(spec.AttributeIndex(b.attribute)));
  return b.value_min + (b.value_max - b.value_min) * (v - a.min) / (a.max - a.min);
}

int BracketOf(const SceneSpec& spec, const SceneParams& params) {
  const double v = BracketValue(spec, params);
  const auto& b = *spec.brackets;
  // Values falling in a gap between brackets go to the nearer edge.
  int best = 0;
  double best_dist = INFINITY;
  for (std::size_t i = 0; i < b.centers.size(); ++i) {
    if (v >= b.lower_bounds[i] && v <= b.upper_bounds[i]) return static_cast<int>(i);
    const double d = std::min(std::abs(v - b.lower_bounds[i]), std::abs(v - b.upper_bounds[i]));
    if (d < best_dist) {
      best_dist = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace styleprobe
