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

#include "styleprobe/rng.h"

#include <random>
#include <stdexcept>

namespace styleprobe {
namespace {

std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t HashLabel(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

Rng::Rng(std::uint64_t seed) : key_(Mix64(seed)) {}

Rng Rng::Derive(std::string_view label, std::uint64_t index) const {
  const std::uint64_t k =
      Mix64(key_ ^ Mix64(HashLabel(label) + Mix64(index + 0x632be59bd9b4e019ULL)));
  return Rng(k, 0);
}

Rng::result_type Rng::operator()() {
  return Mix64(key_ ^ Mix64(counter_++));
}

std::vector<double> SampleStandardNormal(Rng& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("SampleStandardNormal: n must be >= 1");
  std::vector<double> out(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : out) v = normal(rng);
  return out;
}

double SampleUniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  double v = u(rng);
  // uniform_real_distribution is half-open; reject the closed end.
  while (v <= lo) v = u(rng);
  return v;
}

}  // namespace styleprobe
