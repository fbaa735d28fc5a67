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

#ifndef STYLEPROBE_IMAGE_H_
#define STYLEPROBE_IMAGE_H_

#include <cstddef>
#include <vector>

namespace styleprobe {

// h x w x 3 image, row-major, channels interleaved. Values live in [0,1].
struct ImageBuffer {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  ImageBuffer() = default;
  ImageBuffer(int h, int w, double fill = 0.0);

  std::size_t size() const { return data.size(); }
  std::size_t index(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * 3 + c;
  }
  double& at(int y, int x, int c) { return data[index(y, x, c)]; }
  double at(int y, int x, int c) const { return data[index(y, x, c)]; }
  bool SameShape(const ImageBuffer& o) const {
    return height == o.height && width == o.width;
  }
  double Mean() const;

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;
};

// Throws std::invalid_argument unless dimensions match.
void RequireSameShape(const ImageBuffer& a, const ImageBuffer& b,
                      const char* context);

// 2x box downsample (odd trailing rows/columns are dropped).
ImageBuffer Downsample2x(const ImageBuffer& img);

// Snap every value to the 8-bit grid used by the PNG codec.
ImageBuffer Quantize8(const ImageBuffer& img);

}  // namespace styleprobe

#endif  // STYLEPROBE_IMAGE_H_
