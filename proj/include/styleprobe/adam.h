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

#ifndef STYLEPROBE_ADAM_H_
#define STYLEPROBE_ADAM_H_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace styleprobe {

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  long step_count = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState Fresh(std::size_t n, double lr);

  // Bias-corrected Adam update applied to params in place.
  // Throws std::invalid_argument on any length mismatch.
  void Apply(std::span<double> params, std::span<const double> grad);
};

// Functional form: returns the updated state and parameters.
std::pair<AdamState, std::vector<double>> AdamStep(
    AdamState state, std::vector<double> params,
    std::span<const double> grad);

}  // namespace styleprobe

#endif  // STYLEPROBE_ADAM_H_
