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

#ifndef STYLEPROBE_SRC_DUAL_H_
#define STYLEPROBE_SRC_DUAL_H_

#include <array>
#include <cmath>

namespace styleprobe::internal {

constexpr int kMaxTangents = 16;

// Forward-mode dual number carrying a dense tangent block, one slot per
// scene attribute.
struct Dual {
  double v = 0.0;
  std::array<double, kMaxTangents> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: constants promote implicitly
  static Dual Variable(double value, int slot) {
    Dual x(value);
    x.d[static_cast<std::size_t>(slot)] = 1.0;
    return x;
  }
};

inline double Value(double x) { return x; }
inline double Value(const Dual& x) { return x.v; }

inline Dual operator+(const Dual& a, const Dual& b) {
  Dual r;
  r.v = a.v + b.v;
  for (int i = 0; i < kMaxTangents; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}
inline Dual operator+(const Dual& a, double b) {
  Dual r = a;
  r.v += b;
  return r;
}
inline Dual operator+(double a, const Dual& b) { return b + a; }

inline Dual operator-(const Dual& a) {
  Dual r;
  r.v = -a.v;
  for (int i = 0; i < kMaxTangents; ++i) r.d[i] = -a.d[i];
  return r;
}
inline Dual operator-(const Dual& a, const Dual& b) {
  Dual r;
  r.v = a.v - b.v;
  for (int i = 0; i < kMaxTangents; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}
inline Dual operator-(const Dual& a, double b) {
  Dual r = a;
  r.v -= b;
  return r;
}
inline Dual operator-(double a, const Dual& b) {
  Dual r;
  r.v = a - b.v;
  for (int i = 0; i < kMaxTangents; ++i) r.d[i] = -b.d[i];
  return r;
}

inline Dual operator*(const Dual& a, const Dual& b) {
  Dual r;
  r.v = a.v * b.v;
  for (int i = 0; i < kMaxTangents; ++i) r.d[i] = a.d[i] * b.v + b.d[i] * a.v;
  return r;
}
inline Dual operator*(const Dual& a, double b) {
  Dual r;
  r.v = a.v * b;
  for (int i = 0; i < kMaxTangents; ++i) r.d[i] = a.d[i] * b;
  return r;
}
inline Dual operator*(double a, const Dual& b) { return b * a; }

inline Dual operator/(const Dual& a, const Dual& b) {
  const double inv = 1.0 / b.v;
  Dual r;
  r.v = a.v * inv;
  for (int i = 0; i < kMaxTangents; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) * inv;
  return r;
}
inline Dual operator/(const Dual& a, double b) { return a * (1.0 / b); }
inline Dual operator/(double a, const Dual& b) {
  const double inv = 1.0 / b.v;
  Dual r;
  r.v = a * inv;
  const double k = -r.v * inv;
  for (int i = 0; i < kMaxTangents; ++i) r.d[i] = b.d[i] * k;
  return r;
}

inline Dual sqrt(const Dual& a) {
  Dual r;
  r.v = std::sqrt(a.v);
  const double k = 0.5 / r.v;
  for (int i = 0; i < kMaxTangents; ++i) r.d[i] = a.d[i] * k;
  return r;
}
inline Dual sin(const Dual& a) {
  Dual r;
  r.v = std::sin(a.v);
  const double k = std::cos(a.v);
  for (int i = 0; i < kMaxTangents; ++i) r.d[i] = a.d[i] * k;
  return r;
}
inline Dual cos(const Dual& a) {
  Dual r;
  r.v = std::cos(a.v);
  const double k = -std::sin(a.v);
  for (int i = 0; i < kMaxTangents; ++i) r.d[i] = a.d[i] * k;
  return r;
}
inline Dual tanh(const Dual& a) {
  Dual r;
  r.v = std::tanh(a.v);
  const double k = 1.0 - r.v * r.v;
  for (int i = 0; i < kMaxTangents; ++i) r.d[i] = a.d[i] * k;
  return r;
}
inline Dual atan2(const Dual& y, const Dual& x) {
  Dual r;
  r.v = std::atan2(y.v, x.v);
  const double inv = 1.0 / (x.v * x.v + y.v * y.v);
  const double kx = -y.v * inv;
  const double ky = x.v * inv;
  for (int i = 0; i < kMaxTangents; ++i) r.d[i] = x.d[i] * kx + y.d[i] * ky;
  return r;
}

}  // namespace styleprobe::internal

#endif  // STYLEPROBE_SRC_DUAL_H_
