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

#include "styleprobe/image.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace styleprobe {

ImageBuffer::ImageBuffer(int h, int w, double fill) : height(h), width(w) {
  if (h <= 0 || w <= 0) throw std::invalid_argument("ImageBuffer: dimensions must be positive");
  data.assign(static_cast<std::size_t>(h) * w * 3, fill);
}

double ImageBuffer::Mean() const {
  if (data.empty()) return 0.0;
  return std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(data.size());
}

void RequireSameShape(const ImageBuffer& a, const ImageBuffer& b,
                      const char* context) {
  if (!a.SameShape(b)) {
    throw std::invalid_argument(std::string(context) + ": image size mismatch (" +
                                std::to_string(a.height) + "x" + std::to_string(a.width) +
                                " vs " + std::to_string(b.height) + "x" +
                                std::to_string(b.width) + ")");
  }
}

ImageBuffer Downsample2x(const ImageBuffer& img) {
  const int h = img.height / 2;
  const int w = img.width / 2;
  ImageBuffer out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        out.at(y, x, c) = 0.25 * (img.at(2 * y, 2 * x, c) + img.at(2 * y, 2 * x + 1, c) +
                                  img.at(2 * y + 1, 2 * x, c) + img.at(2 * y + 1, 2 * x + 1, c));
      }
    }
  }
  return out;
}

ImageBuffer Quantize8(const ImageBuffer& img) {
  ImageBuffer out = img;
  for (double& v : out.data) {
    // Round half up, matching EncodePng.
    const double q = std::floor(std::clamp(v, 0.0, 1.0) * 255.0 + 0.5);
    v = q / 255.0;
  }
  return out;
}

}  // namespace styleprobe
