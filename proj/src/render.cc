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

#include "styleprobe/render.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dual.h"

namespace styleprobe {

constexpr double kPi = 3.14159265358979323846;
namespace {

using internal::Dual;
using internal::Value;
using std::atan2;
using std::cos;
using std::sin;
using std::sqrt;
using std::tanh;

template <typename T>
struct Rgb {
  T r, g, b;
};

using Color = Rgb<double>;

template <typename T, typename U>
Rgb<T> Mix(const Rgb<double>& a, const Rgb<double>& b, const U& t) {
  return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

template <typename T>
Rgb<T> Scale(const Rgb<T>& c, const T& k) {
  return {c.r * k, c.g * k, c.b * k};
}

// c <- c + (top - c) * m
template <typename T>
void Over(Rgb<T>& c, const Rgb<T>& top, const T& m) {
  c.r = c.r + (top.r - c.r) * m;
  c.g = c.g + (top.g - c.g) * m;
  c.b = c.b + (top.b - c.b) * m;
}

// 1 inside (sd <= -softness), 0 outside (sd >= softness), quintic smoothstep
// in between. The saturated branches return constants, so their derivative
// is exactly zero.
template <typename T>
T Mask(const T& sd) {
  const double t = (Value(sd) + kMaskSoftness) / (2.0 * kMaskSoftness);
  if (t <= 0.0) return T(1.0);
  if (t >= 1.0) return T(0.0);
  const T u = (sd + kMaskSoftness) / (2.0 * kMaskSoftness);
  return 1.0 - u * u * u * (u * (u * 6.0 - 15.0) + 10.0);
}

template <typename T>
T Smootherstep01(const T& u) {
  return u * u * u * (u * (u * 6.0 - 15.0) + 10.0);
}

// Cull test: a shape centred at (cx, cy) whose mask is zero beyond `radius`.
inline bool Outside(double px, double py, double cx, double cy, double radius) {
  const double dx = px - cx;
  const double dy = py - cy;
  const double r = radius + 4.0 * kMaskSoftness;
  return dx * dx + dy * dy > r * r;
}

// Attribute accessor shared by the scene kernels. Unrendered attributes are
// frozen at their midpoint; attributes a table omits use the kernel default.
template <typename T>
class AttributeView {
 public:
  AttributeView(const SceneSpec& spec, const std::vector<T>& values)
      : spec_(spec), values_(values) {}

  T Get(const std::string& name, double fallback) const {
    const int i = spec_.AttributeIndex(name);
    if (i < 0) return T(fallback);
    const auto& a = spec_.attributes[static_cast<std::size_t>(i)];
    if (!a.rendered) return T(a.midpoint());
    return values_[static_cast<std::size_t>(i)];
  }

 private:
  const SceneSpec& spec_;
  const std::vector<T>& values_;
};

// Lighting: a left-to-right gain applied to the backdrop and every surface.
// Colour tables stay <= 0.94 so a gain of at most 1.06 keeps values in [0,1].
constexpr double kLightGain = 0.06;

template <typename T>
class FaceScene {
 public:
  FaceScene(const AttributeView<T>& a, int size) : k_(size / 64.0), half_(size / 2.0) {
    s_ = a.Get("face_scale", 1.0) * k_;
    cx_ = (32.0 + a.Get("face_x", 0.0)) * k_;
    cy_ = (33.0 + a.Get("face_y", 0.0)) * k_;
    const T tilt = a.Get("tilt", 0.0);
    cos_ = cos(tilt);
    sin_ = sin(tilt);
    const T aspect = a.Get("face_aspect", 1.0);
    const T hair_len = a.Get("hair_length", 0.5);
    light_ = a.Get("lighting", 0.0);
    background_ = a.Get("background_brightness", 0.5);

    skin_ = Mix<T>(Color{0.92, 0.78, 0.66}, Color{0.36, 0.23, 0.16}, a.Get("skin_tone", 0.5));
    hair_ = Mix<T>(Color{0.88, 0.72, 0.36}, Color{0.12, 0.09, 0.07}, a.Get("hair_color", 0.5));
    const T makeup = (a.Get("makeup_tint", 0.0) + 1.0) * 0.5;
    lip_ = Mix<T>(Color{0.55, 0.28, 0.26}, Color{0.85, 0.08, 0.24}, makeup);
    blush_alpha_ = makeup * 0.9;

    head_rx_ = s_ * 16.0;
    head_ry_ = s_ * 16.0 * aspect;
    head_scale_ = sqrt(head_rx_ * head_ry_);
    hair_rx_ = s_ * 19.0;
    hair_ry_ = s_ * (19.0 + hair_len * 9.0) * aspect;
    hair_cv_ = s_ * (-2.5 + hair_len * 6.0);
    hair_scale_ = sqrt(hair_rx_ * hair_ry_);
    eye_r_ = a.Get("eye_size", 2.4) * s_;
    eye_du_ = s_ * 6.0;
    eye_dv_ = s_ * -3.5;
    blush_du_ = s_ * 8.5;
    blush_dv_ = s_ * 4.0;
    blush_r_ = s_ * 4.2;
    mouth_v_ = s_ * 7.5;
    mouth_hw_ = s_ * 7.5 * a.Get("mouth_width", 1.0);
    // tanh gain: small curvatures still bend the mouth by a visible amount.
    mouth_amp_ = s_ * 6.0 * (tanh(a.Get("mouth_curvature", 0.0) * 4.0) / std::tanh(4.0));
    mouth_half_thickness_ = s_ * 1.8;

    // Cull radii in image coordinates.
    const double s = Value(s_);
    head_bound_ = std::max(Value(head_rx_), Value(head_ry_));
    hair_bound_ = std::max(Value(hair_rx_), Value(hair_ry_)) + std::abs(Value(hair_cv_));
    eye_bound_ = Value(eye_r_) + 7.0 * s;
    blush_bound_ = Value(blush_r_) + 9.5 * s;
    mouth_bound_ = Value(mouth_hw_) + std::abs(Value(mouth_amp_)) + Value(mouth_v_) + 2.0 * s;
  }

  static constexpr const char* kShapes[] = {"hair", "head", "blush", "eyes", "mouth"};

  // cov, when given, receives the geometric mask of every shape at the pixel.
  Rgb<T> Shade(double px, double py, double* cov = nullptr) const {
    const double xn = (px - half_) / half_;
    const T gain = 1.0 + light_ * (kLightGain * xn);
    const T bg = background_ + light_ * (kLightGain * xn);
    Rgb<T> c{bg, bg, bg};

    const double cx = Value(cx_);
    const double cy = Value(cy_);
    if (Outside(px, py, cx, cy, hair_bound_)) return c;

    const T dx = px - cx_;
    const T dy = py - cy_;
    const T u = cos_ * dx + sin_ * dy;
    const T v = cos_ * dy - sin_ * dx;

    {
      const T qu = u / hair_rx_;
      const T qv = (v - hair_cv_) / hair_ry_;
      const T sd = (sqrt(qu * qu + qv * qv + 1e-12) - 1.0) * hair_scale_;
      const T m = Mask(sd);
      if (cov) cov[0] = Value(m);
      if (Value(m) != 0.0) Over(c, Scale(hair_, gain), m);
    }
    if (Outside(px, py, cx, cy, head_bound_)) return c;
    {
      const T qu = u / head_rx_;
      const T qv = v / head_ry_;
      const T sd = (sqrt(qu * qu + qv * qv + 1e-12) - 1.0) * head_scale_;
      const T m = Mask(sd);
      if (cov) cov[1] = Value(m);
      if (Value(m) == 0.0) return c;
      Over(c, Scale(skin_, gain), m);
    }
    if (!Outside(px, py, cx, cy, blush_bound_)) {
      for (const double side : {-1.0, 1.0}) {
        const T du = u - blush_du_ * side;
        const T dv = v - blush_dv_;
        const T sd = sqrt(du * du + dv * dv + 1e-12) - blush_r_;
        const T m = Mask(sd);
        if (cov) cov[2] += Value(m);
        if (Value(m) != 0.0) Over(c, Scale(Rgb<T>{T(0.88), T(0.33), T(0.43)}, gain), m * blush_alpha_);
      }
    }
    if (!Outside(px, py, cx, cy, eye_bound_)) {
      for (const double side : {-1.0, 1.0}) {
        const T du = u - eye_du_ * side;
        const T dv = v - eye_dv_;
        const T sd = sqrt(du * du + dv * dv + 1e-12) - eye_r_;
        const T m = Mask(sd);
        if (cov) cov[3] += Value(m);
        if (Value(m) != 0.0) Over(c, Rgb<T>{T(0.08), T(0.06), T(0.05)}, m);
      }
    }
    if (!Outside(px, py, cx, cy, mouth_bound_)) {
      const T t = u / mouth_hw_;
      const T curve = mouth_v_ + mouth_amp_ * (0.5 - t * t);
      const T dv = v - curve;
      const T sd_v = sqrt(dv * dv + 0.04) - mouth_half_thickness_;
      const T sd_u = sqrt(u * u + 0.04) - mouth_hw_;
      const T m = Mask(sd_v) * Mask(sd_u);
      if (cov) cov[4] = Value(m);
      if (Value(m) != 0.0) Over(c, Scale(lip_, gain), m);
    }
    return c;
  }

 private:
  double k_, half_;
  T s_, cx_, cy_, cos_, sin_, light_, background_;
  Rgb<T> skin_, hair_, lip_;
  T blush_alpha_;
  T head_rx_, head_ry_, head_scale_;
  T hair_rx_, hair_ry_, hair_cv_, hair_scale_;
  T eye_r_, eye_du_, eye_dv_;
  T blush_du_, blush_dv_, blush_r_;
  T mouth_v_, mouth_hw_, mouth_amp_, mouth_half_thickness_;
  double head_bound_, hair_bound_, eye_bound_, blush_bound_, mouth_bound_;
};

struct FlowerPalette {
  Color petal_a, petal_b, disc_light, disc_dark, backdrop;
};

FlowerPalette PaletteFor(const std::string& name) {
  if (name == "susan-sunflower") {
    return {{0.94, 0.80, 0.12}, {0.93, 0.56, 0.05}, {0.86, 0.66, 0.14}, {0.16, 0.08, 0.04},
            {0.90, 1.0, 0.86}};
  }
  // daisy-poppy: white petals at hue -1, orange at +1.
  return {{0.94, 0.94, 0.91}, {0.94, 0.48, 0.06}, {0.92, 0.76, 0.14}, {0.34, 0.20, 0.05},
          {0.90, 1.0, 0.86}};
}

template <typename T>
class FlowerScene {
 public:
  FlowerScene(const AttributeView<T>& a, const std::string& palette, int size)
      : k_(size / 64.0), half_(size / 2.0), pal_(PaletteFor(palette)) {
    const T s = a.Get("scale", 1.0) * k_;
    // The disc is sized in absolute pixels; only the petals follow `scale`.
    cx_ = (32.0 + a.Get("center_x", 0.0)) * k_;
    cy_ = (32.0 + a.Get("center_y", 0.0)) * k_;
    rotation_ = a.Get("rotation", 0.0) * (kPi / 180.0);
    width_ = a.Get("petal_width", 0.5);
    count_ = a.Get("petal_count", 8.0);
    petal_len_ = a.Get("petal_length", 10.0) * s;
    disc_r_ = a.Get("disc_radius", 5.0) * k_;
    light_ = a.Get("lighting", 0.0);
    background_ = a.Get("background_brightness", 0.5);
    petal_ = Mix<T>(pal_.petal_a, pal_.petal_b,
                    0.5 + 0.5 * tanh(a.Get("petal_hue", 0.0) * 3.0) / std::tanh(3.0));
    disc_ = Mix<T>(pal_.disc_light, pal_.disc_dark,
                   0.5 + 0.5 * tanh((a.Get("disc_darkness", 0.5) - 0.5) * 5.0) / std::tanh(2.5));

    // Fractional petal counts blend the two neighbouring integer counts with a
    // smootherstep weight, which keeps the profile C2 across integers.
    count_lo_ = std::floor(Value(count_));
    count_frac_ = count_ - count_lo_;
    outer_bound_ = Value(disc_r_) + Value(petal_len_);
    disc_bound_ = Value(disc_r_);
  }

  static constexpr const char* kShapes[] = {"petals", "disc"};

  Rgb<T> Shade(double px, double py, double* cov = nullptr) const {
    // Lighting only shades the backdrop here; petal and disc colours carry
    // the class cues.
    const double xn = (px - half_) / half_;
    const T bg = background_ + light_ * (kLightGain * xn);
    Rgb<T> c{bg * pal_.backdrop.r, bg * pal_.backdrop.g, bg * pal_.backdrop.b};

    const double cx = Value(cx_);
    const double cy = Value(cy_);
    if (Outside(px, py, cx, cy, outer_bound_)) return c;

    const T dx = px - cx_;
    const T dy = py - cy_;
    const T r = sqrt(dx * dx + dy * dy + 1e-12);
    const T theta = atan2(dy, dx) - rotation_;
    {
      const T lo = PetalProfile(cos(theta * count_lo_));
      const T hi = PetalProfile(cos(theta * (count_lo_ + 1.0)));
      const T profile = lo + (hi - lo) * Smootherstep01(count_frac_);
      const T sd = r - (disc_r_ + petal_len_ * profile);
      const T m = Mask(sd);
      if (cov) cov[0] = Value(m);
      if (Value(m) != 0.0) Over(c, petal_, m);
    }
    if (!Outside(px, py, cx, cy, disc_bound_)) {
      const T m = Mask(r - disc_r_);
      if (cov) cov[1] = Value(m);
      if (Value(m) != 0.0) Over(c, disc_, m);
    }
    return c;
  }

 private:
  // Radial petal extent in [0,1] from cos(n theta); petal_width moves the
  // lobe from a narrow quartic to a broad linear profile.
  T PetalProfile(const T& cosine) const {
    const T x = (cosine + 1.0) * 0.5;
    const T x2 = x * x;
    return x2 * x2 + (x - x2 * x2) * width_;
  }

  double k_, half_;
  FlowerPalette pal_;
  T cx_, cy_, rotation_, width_, count_, petal_len_, disc_r_, light_, background_;
  Rgb<T> petal_, disc_;
  double count_lo_;
  T count_frac_;
  double outer_bound_, disc_bound_;
};

template <typename T, typename Sink>
void RenderKernel(const SceneSpec& spec, const std::vector<T>& values, int size, Sink&& sink) {
  const AttributeView<T> view(spec, values);
  auto run = [&](const auto& scene) {
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        sink(y, x, scene.Shade(x + 0.5, y + 0.5));
      }
    }
  };
  if (spec.renderer == "face") {
    run(FaceScene<T>(view, size));
  } else if (spec.renderer == "flower") {
    run(FlowerScene<T>(view, spec.palette, size));
  } else {
    throw std::invalid_argument("unknown renderer '" + spec.renderer + "'");
  }
}

template <typename Scene>
CoverageMaps Coverage(const Scene& scene, int size) {
  CoverageMaps out;
  const std::size_t shapes = std::size(Scene::kShapes);
  out.names.assign(std::begin(Scene::kShapes), std::end(Scene::kShapes));
  out.masks.assign(shapes, std::vector<double>(static_cast<std::size_t>(size) * size, 0.0));
  std::vector<double> cov(shapes);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      std::fill(cov.begin(), cov.end(), 0.0);
      scene.Shade(x + 0.5, y + 0.5, cov.data());
      for (std::size_t k = 0; k < shapes; ++k) out.masks[k][static_cast<std::size_t>(y) * size + x] = cov[k];
    }
  }
  return out;
}

void CheckParams(const SceneSpec& spec, const SceneParams& params, int size) {
  if (params.values.size() != spec.attributes.size()) {
    throw std::invalid_argument("RenderScene: parameter count does not match scene '" + spec.id + "'");
  }
  if (spec.attributes.size() > static_cast<std::size_t>(kMaxSceneAttributes)) {
    throw std::invalid_argument("RenderScene: too many attributes");
  }
  if (size <= 0) throw std::invalid_argument("RenderScene: size must be positive");
}

}  // namespace

ImageBuffer RenderScene(const SceneSpec& spec, const SceneParams& params, int size) {
  CheckParams(spec, params, size);
  ImageBuffer img(size, size);
  RenderKernel<double>(spec, params.values, size, [&](int y, int x, const Rgb<double>& c) {
    img.at(y, x, 0) = c.r;
    img.at(y, x, 1) = c.g;
    img.at(y, x, 2) = c.b;
  });
  return img;
}

CoverageMaps RenderCoverage(const SceneSpec& spec, const SceneParams& params, int size) {
  CheckParams(spec, params, size);
  const AttributeView<double> view(spec, params.values);
  if (spec.renderer == "face") return Coverage(FaceScene<double>(view, size), size);
  if (spec.renderer == "flower") return Coverage(FlowerScene<double>(view, spec.palette, size), size);
  throw std::invalid_argument("unknown renderer '" + spec.renderer + "'");
}

RenderJacobian RenderSceneJacobian(const SceneSpec& spec, const SceneParams& params, int size) {
  CheckParams(spec, params, size);
  const std::size_t n = spec.attributes.size();
  std::vector<Dual> values;
  values.reserve(n);
  for (std::size_t i = 0; i < n; ++i) values.push_back(Dual::Variable(params.values[i], static_cast<int>(i)));

  RenderJacobian out;
  out.image = ImageBuffer(size, size);
  out.d_attribute.assign(n, std::vector<double>(out.image.size(), 0.0));
  RenderKernel<Dual>(spec, values, size, [&](int y, int x, const Rgb<Dual>& c) {
    const std::size_t base = out.image.index(y, x, 0);
    const Dual* ch[3] = {&c.r, &c.g, &c.b};
    for (int k = 0; k < 3; ++k) {
      out.image.data[base + k] = ch[k]->v;
      for (std::size_t a = 0; a < n; ++a) out.d_attribute[a][base + k] = ch[k]->d[a];
    }
  });
  return out;
}

}  // namespace styleprobe
