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

#ifndef STYLEPROBE_IMAGE_IO_H_
#define STYLEPROBE_IMAGE_IO_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "styleprobe/image.h"

namespace styleprobe {

// 8-bit RGB PNG. Each value maps to floor(255 v + 0.5) after clamping to
// [0,1]; decoding maps byte b back to b / 255.
std::vector<std::uint8_t> EncodePng(const ImageBuffer& img);
// Throws std::runtime_error on malformed input. Grey/alpha/palette inputs are
// converted to RGB.
ImageBuffer DecodePng(const std::vector<std::uint8_t>& bytes);

void WritePng(const std::string& path, const ImageBuffer& img);
ImageBuffer ReadPng(const std::string& path);

std::string Base64Encode(const std::vector<std::uint8_t>& bytes);
// Throws std::runtime_error on characters outside the standard alphabet.
std::vector<std::uint8_t> Base64Decode(std::string_view text);

std::string EncodePngBase64(const ImageBuffer& img);
ImageBuffer DecodePngBase64(std::string_view text);

// Horizontal strip of equally sized images with a 2 px separator.
ImageBuffer ImageStrip(const std::vector<ImageBuffer>& images, double separator = 1.0);

}  // namespace styleprobe

#endif  // STYLEPROBE_IMAGE_IO_H_
