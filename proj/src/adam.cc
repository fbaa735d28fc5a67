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

#include "styleprobe/adam.h"

#include <cmath>
#include <stdexcept>

namespace styleprobe {

AdamState AdamState::Fresh(std::size_t n, double lr) {
  AdamState s;
  s.first_moment.assign(n, 0.0);
  s.second_moment.assign(n, 0.0);
  s.lr = lr;
  return s;
}

void AdamState::Apply(std::span<double> params, std::span<const double> grad) {
  const std::size_t n = params.size();
  if (grad.size() != n || first_moment.size() != n || second_moment.size() != n) {
    throw std::invalid_argument("AdamState::Apply: length mismatch");
  }
  ++step_count;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
  for (std::size_t i = 0; i < n; ++i) {
    first_moment[i] = beta1 * first_moment[i] + (1.0 - beta1) * grad[i];
    second_moment[i] = beta2 * second_moment[i] + (1.0 - beta2) * grad[i] * grad[i];
    const double m_hat = first_moment[i] / c1;
    const double v_hat = second_moment[i] / c2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + epsilon);
  }
}

std::pair<AdamState, std::vector<double>> AdamStep(
    AdamState state, std::vector<double> params,
    std::span<const double> grad) {
  state.Apply(params, grad);
  return {std::move(state), std::move(params)};
}

}  // namespace styleprobe
