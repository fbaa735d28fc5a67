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

#ifndef STYLEPROBE_STYLE_H_
#define STYLEPROBE_STYLE_H_

#include <string>
#include <variant>
#include <vector>

namespace styleprobe {

// Generator input z, sampled from N(0, I).
struct LatentCode {
  std::vector<double> values;
  friend bool operator==(const LatentCode&, const LatentCode&) = default;
};

// Mapped style w. Every component lies strictly inside (-1, 1).
struct StyleVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool InOpenCube() const;
  friend bool operator==(const StyleVector&, const StyleVector&) = default;
};

struct SingleStyle {
  StyleVector style;
};

struct BlendStyle {
  StyleVector a;
  StyleVector b;
  double alpha = 0.0;
};

using LayerStyle = std::variant<SingleStyle, BlendStyle>;

// Linear interpolation a + alpha (b - a). Exact at both endpoints and when
// a == b.
StyleVector Interpolate(const StyleVector& a, const StyleVector& b, double alpha);

// Style in effect at a layer: the single style, or the resolved blend.
StyleVector EffectiveStyle(const LayerStyle& layer);

// One entry per generator layer.
struct LayerAssignment {
  std::vector<LayerStyle> layers;

  static LayerAssignment Uniform(const StyleVector& w, int num_layers);
  // Throws std::invalid_argument on wrong layer count, style dimension, or
  // alpha outside [0,1].
  void Validate(int num_layers, int style_dim) const;
};

// Ordered partition of layers 1..L into contiguous blocks, stored as block
// sizes (e.g. {2,2,2} for L=6).
class LayerGrouping {
 public:
  LayerGrouping() = default;
  LayerGrouping(std::vector<int> sizes, std::vector<std::string> names = {});

  int num_groups() const { return static_cast<int>(sizes_.size()); }
  int num_layers() const;
  const std::vector<int>& sizes() const { return sizes_; }
  const std::vector<std::string>& names() const { return names_; }
  // Zero-based layer range [first, last] of a group.
  int first_layer(int group) const;
  int last_layer(int group) const;
  int group_of_layer(int layer) const;

  // Expands one LayerStyle per group into one per layer.
  LayerAssignment Expand(const std::vector<LayerStyle>& per_group) const;

 private:
  std::vector<int> sizes_;
  std::vector<std::string> names_;
};

}  // namespace styleprobe

#endif  // STYLEPROBE_STYLE_H_
