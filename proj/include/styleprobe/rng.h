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

#ifndef STYLEPROBE_RNG_H_
#define STYLEPROBE_RNG_H_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

namespace styleprobe {

// Counter-based 64-bit generator. Each output is a keyed hash of a running
// counter, so independent streams are obtained by deriving a new key from a
// label instead of advancing a shared state. Satisfies
// UniformRandomBitGenerator and can drive the <random> distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0);

  // Child stream keyed on (this key, label, index). Does not advance *this.
  Rng Derive(std::string_view label, std::uint64_t index = 0) const;

  result_type operator()();

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  Rng(std::uint64_t key, std::uint64_t counter) : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// n i.i.d. N(0,1) draws. Throws std::invalid_argument when n == 0.
std::vector<double> SampleStandardNormal(Rng& rng, std::size_t n);

// Uniform draw on the open interval (lo, hi).
double SampleUniform(Rng& rng, double lo, double hi);

}  // namespace styleprobe

#endif  // STYLEPROBE_RNG_H_
