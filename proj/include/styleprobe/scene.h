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

#ifndef STYLEPROBE_SCENE_H_
#define STYLEPROBE_SCENE_H_

#include <optional>
#include <string>
#include <vector>

#include "styleprobe/style.h"

namespace styleprobe {

// One renderer parameter driven by a single style component at one layer.
struct AttributeSpec {
  std::string name;
  int layer = 0;      // zero-based generator layer
  int component = 0;  // index into the style vector
  double min = 0.0;
  double max = 1.0;
  // When false the renderer ignores the attribute and uses its midpoint.
  bool rendered = true;

  double midpoint() const { return 0.5 * (min + max); }
};

// Label clause: attribute `op` threshold, op in {"<", ">"}. Equality fails the
// clause, so ties fall to the negative class.
struct LabelClause {
  std::string attribute;
  std::string op;
  double threshold = 0.0;
};

// Ordinal target: the attribute is mapped linearly from [min,max] onto
// [value_min, value_max] and bucketed into brackets.
struct BracketRule {
  std::string attribute;
  double value_min = 0.0;
  double value_max = 1.0;
  std::vector<double> lower_bounds;  // inclusive lower edge of each bracket
  std::vector<double> upper_bounds;  // inclusive upper edge
  std::vector<double> centers;
};

struct SceneSpec {
  std::string id;
  std::string renderer;  // "face" | "flower"
  std::string palette;   // renderer-specific colour table
  std::vector<AttributeSpec> attributes;
  // Label = +1 iff every clause holds.
  std::vector<LabelClause> label_clauses;
  // Default plantable confounder (sign relative to its midpoint).
  std::optional<std::string> confounder;
  std::optional<BracketRule> brackets;

  int AttributeIndex(const std::string& name) const;  // -1 when absent
  const AttributeSpec& Attribute(const std::string& name) const;
  // Throws std::invalid_argument when the table is inconsistent with the
  // generator geometry.
  void Validate(int num_layers, int style_dim) const;
};

// Attribute values aligned with SceneSpec::attributes.
struct SceneParams {
  std::vector<double> values;
  friend bool operator==(const SceneParams&, const SceneParams&) = default;
};

// Smoothstep map from a style component in (-1,1) into [min,max]. w = 0 maps
// to the midpoint.
double AttributeFromStyle(const AttributeSpec& attr, double w);
double AttributeStyleDerivative(const AttributeSpec& attr, double w);
// Inverse of AttributeFromStyle on the open range.
double StyleFromAttribute(const AttributeSpec& attr, double value);

// Layer l's attributes are read from the style in effect at layer l only.
SceneParams DecodeStyles(const SceneSpec& spec, const LayerAssignment& assignment);
SceneParams DecodeStyle(const SceneSpec& spec, const StyleVector& w);

int LabelOf(const SceneSpec& spec, const SceneParams& params);
// Zero-based bracket index. Throws when the scene has no bracket rule.
int BracketOf(const SceneSpec& spec, const SceneParams& params);
double BracketValue(const SceneSpec& spec, const SceneParams& params);

}  // namespace styleprobe

#endif  // STYLEPROBE_SCENE_H_
