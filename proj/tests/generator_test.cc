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

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "styleprobe/config.h"
#include "styleprobe/generator.h"
#include "styleprobe/render.h"
#include "styleprobe/scene.h"

namespace styleprobe {
namespace {

const std::vector<std::string> kScenarios = {"toy-faces", "toy-flowers-a", "toy-flowers-b"};

const Generator& Gen() {
  static const Generator gen(DefaultConfig());
  return gen;
}

// Independent decode oracle: min + (max - min) * smoothstep((w + 1) / 2).
double DecodeOracle(const AttributeSpec& a, double w) {
  const double t = 0.5 * (w + 1.0);
  return a.min + (a.max - a.min) * t * t * (3.0 - 2.0 * t);
}

double MaxAbsDiff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

TEST_CASE("mapping matrix is orthogonal") {
  const auto& a = Gen().mapping().matrix();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  CHECK((a.transpose() * a - eye).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("map_latent basics") {
  const auto& gen = Gen();
  const StyleVector w0 = gen.MapLatent(LatentCode{std::vector<double>(16, 0.0)});
  for (double v : w0.values) CHECK(v == 0.0);

  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const StyleVector w = gen.RandomStyle(rng);
    CHECK(w.InOpenCube());
  }
  // Far outside the usual range tanh rounds to 1; the map still stays inside.
  const StyleVector far = gen.MapLatent(LatentCode{std::vector<double>(16, 400.0)});
  CHECK(far.InOpenCube());

  CHECK_THROWS_AS(gen.MapLatent(LatentCode{std::vector<double>(15, 0.0)}), std::invalid_argument);
  CHECK_THROWS_AS(gen.MapLatent(LatentCode{std::vector<double>(16, NAN)}), std::invalid_argument);
}

TEST_CASE("unmap_latent inverts map_latent") {
  const auto& gen = Gen();
  const LatentCode z0 = gen.UnmapLatent(StyleVector{std::vector<double>(16, 0.0)});
  for (double v : z0.values) CHECK(v == 0.0);

  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    const LatentCode z{SampleStandardNormal(rng, 16)};
    const LatentCode back = gen.UnmapLatent(gen.MapLatent(z));
    CHECK(MaxAbsDiff(z.values, back.values) < 1e-9);
  }
  StyleVector edge{std::vector<double>(16, 0.0)};
  edge.values[4] = 1.0;
  CHECK_THROWS_AS(gen.UnmapLatent(edge), std::invalid_argument);
  CHECK_THROWS_AS(gen.UnmapLatent(StyleVector{std::vector<double>(3, 0.0)}), std::invalid_argument);
}

TEST_CASE("attribute decode follows the smoothstep map and inverts") {
  for (const auto& id : kScenarios) {
    const SceneSpec& spec = Gen().scenario(id);
    for (const auto& a : spec.attributes) {
      for (double w : {-0.999, -0.6, -0.1, 0.0, 0.3, 0.75, 0.999}) {
        CHECK(AttributeFromStyle(a, w) == doctest::Approx(DecodeOracle(a, w)).epsilon(1e-14));
        const double v = AttributeFromStyle(a, w);
        CHECK(StyleFromAttribute(a, v) == doctest::Approx(w).epsilon(1e-9));
        // Derivative oracle: central difference.
        const double h = 1e-6;
        const double fd = (AttributeFromStyle(a, w + h) - AttributeFromStyle(a, w - h)) / (2 * h);
        CHECK(AttributeStyleDerivative(a, w) == doctest::Approx(fd).epsilon(1e-6));
      }
      CHECK(AttributeFromStyle(a, 0.0) == doctest::Approx(a.midpoint()).epsilon(1e-15));
    }
  }
}

TEST_CASE("decode of uniform assignment equals decoding the style alone") {
  const auto& gen = Gen();
  Rng rng(13);
  for (const auto& id : kScenarios) {
    const StyleVector w = gen.RandomStyle(rng);
    CHECK(gen.Decode(LayerAssignment::Uniform(w, 6), id) == DecodeStyle(gen.scenario(id), w));
  }
}

TEST_CASE("layer locality: editing one layer leaves every other layer's attributes unchanged") {
  const auto& gen = Gen();
  Rng rng(14);
  for (const auto& id : kScenarios) {
    const SceneSpec& spec = gen.scenario(id);
    const StyleVector w = gen.RandomStyle(rng);
    for (int layer = 0; layer < 6; ++layer) {
      LayerAssignment edited = LayerAssignment::Uniform(w, 6);
      edited.layers[static_cast<std::size_t>(layer)] = SingleStyle{gen.RandomStyle(rng)};
      const SceneParams base = gen.Decode(LayerAssignment::Uniform(w, 6), id);
      const SceneParams mixed = gen.Decode(edited, id);
      for (std::size_t a = 0; a < spec.attributes.size(); ++a) {
        if (spec.attributes[a].layer != layer) CHECK(base.values[a] == mixed.values[a]);
      }
    }
  }
}

TEST_CASE("blend at a layer decodes the interpolated style") {
  const auto& gen = Gen();
  Rng rng(15);
  const SceneSpec& spec = gen.scenario("toy-faces");
  const StyleVector a = gen.RandomStyle(rng);
  const StyleVector b = gen.RandomStyle(rng);
  LayerAssignment mix = LayerAssignment::Uniform(a, 6);
  mix.layers[2] = BlendStyle{a, b, 0.5};
  const SceneParams p = gen.Decode(mix, "toy-faces");
  StyleVector mid;
  for (std::size_t i = 0; i < a.size(); ++i) mid.values.push_back(a.values[i] + 0.5 * (b.values[i] - a.values[i]));
  const SceneParams q = DecodeStyle(spec, mid);
  for (std::size_t i = 0; i < spec.attributes.size(); ++i) {
    if (spec.attributes[i].layer == 2) CHECK(p.values[i] == q.values[i]);
  }
}

TEST_CASE("interpolation endpoints and identical blends are bit-exact") {
  const auto& gen = Gen();
  Rng rng(16);
  for (const auto& id : kScenarios) {
    const StyleVector a = gen.RandomStyle(rng);
    const StyleVector b = gen.RandomStyle(rng);
    const ImageBuffer img_a = gen.SynthesizeStyle(a, id);
    const ImageBuffer img_b = gen.SynthesizeStyle(b, id);
    LayerAssignment at0, at1, same;
    for (int l = 0; l < 6; ++l) {
      at0.layers.push_back(BlendStyle{a, b, 0.0});
      at1.layers.push_back(BlendStyle{a, b, 1.0});
      same.layers.push_back(BlendStyle{a, a, 0.37});
    }
    CHECK(gen.Synthesize(at0, id) == img_a);
    CHECK(gen.Synthesize(at1, id) == img_b);
    CHECK(gen.Synthesize(same, id) == img_a);
  }
}

TEST_CASE("synthesize_from_z composes map and synthesize") {
  const auto& gen = Gen();
  Rng rng(17);
  for (const auto& id : kScenarios) {
    const LatentCode z{SampleStandardNormal(rng, 16)};
    const ImageBuffer direct = gen.Synthesize(LayerAssignment::Uniform(gen.MapLatent(z), 6), id);
    CHECK(gen.SynthesizeFromZ(z, id) == direct);
    CHECK(gen.SynthesizeFromZ(z, id) == gen.SynthesizeFromZ(z, id));

    // Through the inverse map the round trip is floating point, not bit-exact.
    const StyleVector w = gen.RandomStyle(rng);
    const ImageBuffer via_z = gen.SynthesizeFromZ(gen.UnmapLatent(w), id);
    CHECK(MaxAbsDiff(via_z.data, gen.SynthesizeStyle(w, id).data) < 1e-9);
  }
}

TEST_CASE("z = 0 renders the canonical scene with every attribute at its midpoint") {
  const auto& gen = Gen();
  for (const auto& id : kScenarios) {
    const SceneSpec& spec = gen.scenario(id);
    const StyleVector w = gen.MapLatent(LatentCode{std::vector<double>(16, 0.0)});
    const SceneParams p = DecodeStyle(spec, w);
    for (std::size_t a = 0; a < spec.attributes.size(); ++a) {
      CHECK(p.values[a] == doctest::Approx(spec.attributes[a].midpoint()).epsilon(1e-15));
    }
  }
}

TEST_CASE("rendered values stay in [0, 1]") {
  const auto& gen = Gen();
  Rng rng(18);
  for (const auto& id : kScenarios) {
    for (int i = 0; i < 40; ++i) {
      const ImageBuffer img = gen.SynthesizeStyle(gen.RandomStyle(rng), id);
      REQUIRE(img.height == 64);
      REQUIRE(img.width == 64);
      const auto [lo, hi] = std::minmax_element(img.data.begin(), img.data.end());
      CHECK(*lo >= 0.0);
      CHECK(*hi <= 1.0);
    }
  }
}

SceneParams Midpoints(const SceneSpec& spec) {
  SceneParams p;
  for (const auto& a : spec.attributes) p.values.push_back(a.midpoint());
  return p;
}

TEST_CASE("fine-layer colour changes keep every geometry mask identical") {
  const auto& gen = Gen();
  Rng rng(19);
  for (const auto& id : kScenarios) {
    const SceneSpec& spec = gen.scenario(id);
    for (int trial = 0; trial < 3; ++trial) {
      const StyleVector w = gen.RandomStyle(rng);
      LayerAssignment recolored = LayerAssignment::Uniform(w, 6);
      const StyleVector other = gen.RandomStyle(rng);
      recolored.layers[4] = SingleStyle{other};
      recolored.layers[5] = SingleStyle{other};
      const SceneParams p = gen.Decode(LayerAssignment::Uniform(w, 6), id);
      const SceneParams q = gen.Decode(recolored, id);
      const CoverageMaps cp = RenderCoverage(spec, p, 64);
      const CoverageMaps cq = RenderCoverage(spec, q, 64);
      REQUIRE(cp.masks.size() == cq.masks.size());
      for (std::size_t k = 0; k < cp.masks.size(); ++k) CHECK(cp.masks[k] == cq.masks[k]);
      CHECK(gen.Render(p, id) != gen.Render(q, id));
    }
  }
  // A middle-layer edit does move geometry.
  const SceneSpec& faces = gen.scenario("toy-faces");
  SceneParams p = Midpoints(faces);
  SceneParams q = p;
  q.values[static_cast<std::size_t>(faces.AttributeIndex("mouth_curvature"))] = 0.8;
  const auto mouth_p = RenderCoverage(faces, p, 64).masks[4];
  const auto mouth_q = RenderCoverage(faces, q, 64).masks[4];
  CHECK(mouth_p != mouth_q);
}

TEST_CASE("background brightness is monotone in the mean pixel value") {
  const auto& gen = Gen();
  for (const auto& id : kScenarios) {
    const SceneSpec& spec = gen.scenario(id);
    const auto i = static_cast<std::size_t>(spec.AttributeIndex("background_brightness"));
    SceneParams lo = Midpoints(spec), hi = Midpoints(spec);
    lo.values[i] = spec.attributes[i].min;
    hi.values[i] = spec.attributes[i].max;
    CHECK(gen.Render(hi, id).Mean() > gen.Render(lo, id).Mean());

    const RenderJacobian jac = RenderSceneJacobian(spec, Midpoints(spec), 64);
    double dmean = 0.0;
    for (double d : jac.d_attribute[i]) dmean += d;
    CHECK(dmean > 0.0);
  }
}

TEST_CASE("render jacobian matches central finite differences") {
  const auto& gen = Gen();
  Rng rng(20);
  const double h = 1e-4;
  for (const auto& id : kScenarios) {
    const SceneSpec& spec = gen.scenario(id);
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
      const SceneParams p = DecodeStyle(spec, gen.RandomStyle(rng));
      const RenderJacobian jac = RenderSceneJacobian(spec, p, 64);
      CHECK(MaxAbsDiff(jac.image.data, RenderScene(spec, p, 64).data) < 1e-12);
      for (std::size_t a = 0; a < spec.attributes.size(); ++a) {
        SceneParams plus = p, minus = p;
        plus.values[a] += h;
        minus.values[a] -= h;
        const ImageBuffer ip = RenderScene(spec, plus, 64);
        const ImageBuffer im = RenderScene(spec, minus, 64);
        for (std::size_t k = 0; k < ip.data.size(); ++k) {
          const double fd = (ip.data[k] - im.data[k]) / (2 * h);
          worst = std::max(worst, std::abs(fd - jac.d_attribute[a][k]));
        }
      }
    }
    INFO(id << " worst jacobian deviation " << worst);
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("an attribute with no visual effect has a zero gradient image") {
  SceneSpec spec = Gen().scenario("toy-faces");
  const auto i = static_cast<std::size_t>(spec.AttributeIndex("hair_color"));
  spec.attributes[i].rendered = false;
  const RenderJacobian jac = RenderSceneJacobian(spec, Midpoints(spec), 64);
  for (double d : jac.d_attribute[i]) CHECK(d == 0.0);
  SceneParams shifted = Midpoints(spec);
  shifted.values[i] = spec.attributes[i].max;
  CHECK(RenderScene(spec, shifted, 64) == RenderScene(spec, Midpoints(spec), 64));
}

// Regression bound: nudging any attribute by 1e-3 inside its range moves no
// pixel by more than c * 1e-3. c was measured once per scenario and frozen.
TEST_CASE("image is Lipschitz in every attribute") {
  const auto& gen = Gen();
  const std::map<std::string, double> kBound = {
      {"toy-faces", 14.0}, {"toy-flowers-a", 14.0}, {"toy-flowers-b", 8.0}};  // measured 11.3, 10.8, 6.0
  const double delta = 1e-3;
  Rng rng(21);
  for (const auto& id : kScenarios) {
    const SceneSpec& spec = gen.scenario(id);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const SceneParams p = DecodeStyle(spec, gen.RandomStyle(rng));
      const ImageBuffer base = RenderScene(spec, p, 64);
      for (std::size_t a = 0; a < spec.attributes.size(); ++a) {
        SceneParams q = p;
        const auto& attr = spec.attributes[a];
        q.values[a] = p.values[a] + delta <= attr.max ? p.values[a] + delta : p.values[a] - delta;
        worst = std::max(worst, MaxAbsDiff(RenderScene(spec, q, 64).data, base.data) / delta);
      }
    }
    INFO(id << " lipschitz estimate " << worst);
    CHECK(worst <= kBound.at(id));
  }
}

TEST_CASE("assignment validation") {
  const auto& gen = Gen();
  const StyleVector w{std::vector<double>(16, 0.1)};
  CHECK_THROWS_AS(gen.Synthesize(LayerAssignment::Uniform(w, 5), "toy-faces"), std::invalid_argument);
  LayerAssignment bad_alpha = LayerAssignment::Uniform(w, 6);
  bad_alpha.layers[1] = BlendStyle{w, w, 1.5};
  CHECK_THROWS_AS(gen.Synthesize(bad_alpha, "toy-faces"), std::invalid_argument);
  StyleVector out = w;
  out.values[0] = 1.0;
  CHECK_THROWS_AS(gen.Synthesize(LayerAssignment::Uniform(out, 6), "toy-faces"), std::invalid_argument);
  CHECK_THROWS(gen.SynthesizeStyle(w, "no-such-scene"));
}

TEST_CASE("layer grouping") {
  const LayerGrouping& g = Gen().geometry().grouping;
  CHECK(g.num_groups() == 3);
  CHECK(g.num_layers() == 6);
  int next = 0;
  for (int k = 0; k < g.num_groups(); ++k) {
    CHECK(g.first_layer(k) == next);
    CHECK(g.last_layer(k) >= g.first_layer(k));
    for (int l = g.first_layer(k); l <= g.last_layer(k); ++l) CHECK(g.group_of_layer(l) == k);
    next = g.last_layer(k) + 1;
  }
  CHECK(next == 6);
  CHECK(g.names() == std::vector<std::string>{"coarse", "middle", "fine"});

  const StyleVector a{std::vector<double>(16, 0.1)}, b{std::vector<double>(16, -0.2)};
  const LayerAssignment expanded = g.Expand({SingleStyle{a}, SingleStyle{b}, SingleStyle{a}});
  REQUIRE(expanded.layers.size() == 6);
  CHECK(EffectiveStyle(expanded.layers[2]) == b);
  CHECK(EffectiveStyle(expanded.layers[3]) == b);
  CHECK(EffectiveStyle(expanded.layers[5]) == a);

  CHECK_THROWS_AS(LayerGrouping({2, 0, 4}), std::invalid_argument);
  CHECK_THROWS_AS(LayerGrouping(std::vector<int>{}), std::invalid_argument);
  CHECK_THROWS_AS(g.Expand({SingleStyle{a}}), std::invalid_argument);
}

}  // namespace
}  // namespace styleprobe
