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
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "styleprobe/config.h"
#include "styleprobe/dataset.h"
#include "styleprobe/render.h"
#include "styleprobe/scene.h"

namespace styleprobe {
namespace {

const WorkbenchConfig& Cfg() {
  static const WorkbenchConfig cfg = DefaultConfig();
  return cfg;
}

SceneParams Midpoints(const SceneSpec& spec) {
  SceneParams p;
  for (const auto& a : spec.attributes) p.values.push_back(a.midpoint());
  return p;
}

SceneParams With(const SceneSpec& spec, SceneParams p, const std::string& name, double v) {
  p.values[static_cast<std::size_t>(spec.AttributeIndex(name))] = v;
  return p;
}

// Counted independently of ConfounderAgreement.
double Agreement(const SceneSpec& spec, const std::vector<LabeledExample>& xs, const std::string& name) {
  const auto i = static_cast<std::size_t>(spec.AttributeIndex(name));
  const double mid = spec.attributes[i].midpoint();
  int agree = 0;
  for (const auto& x : xs) {
    const int side = x.params.values[i] > mid ? 1 : -1;
    agree += side == x.label ? 1 : 0;
  }
  return static_cast<double>(agree) / static_cast<double>(xs.size());
}

TEST_CASE("confounder agreement follows (1 + rho) / 2 over 1e4 samples") {
  const SceneSpec& spec = Cfg().Scenario("toy-faces");
  const LabeledDataset d0 = MakeDataset(Cfg(), "toy-faces", 10000, 0, 0.0, Rng(3));
  const LabeledDataset d95 = MakeDataset(Cfg(), "toy-faces", 10000, 0, 0.95, Rng(3));
  const double a0 = Agreement(spec, d0.train, "makeup_tint");
  const double a95 = Agreement(spec, d95.train, "makeup_tint");
  CHECK(std::abs(a0 - 0.5) <= 0.02);
  CHECK(std::abs(a95 - 0.975) <= 0.01);
  CHECK(ConfounderAgreement(spec, d95.train, "makeup_tint") == doctest::Approx(a95));

  SUBCASE("confounder marginal does not depend on rho") {
    const auto i = static_cast<std::size_t>(spec.AttributeIndex("makeup_tint"));
    auto quantiles = [&](const LabeledDataset& d) {
      std::vector<double> v;
      for (const auto& x : d.train) v.push_back(x.params.values[i]);
      std::sort(v.begin(), v.end());
      std::vector<double> q;
      for (int k = 1; k < 10; ++k) q.push_back(v[v.size() * static_cast<std::size_t>(k) / 10]);
      return q;
    };
    const auto q0 = quantiles(d0);
    const auto q95 = quantiles(d95);
    // Uniform on [-1, 1]: decile k sits at -1 + 0.2 k.
    for (std::size_t k = 0; k < q0.size(); ++k) {
      const double expected = -1.0 + 0.2 * static_cast<double>(k + 1);
      CHECK(std::abs(q0[k] - expected) < 0.04);
      CHECK(std::abs(q95[k] - expected) < 0.04);
    }
  }
}

TEST_CASE("reversed polarity and an alternative confounder") {
  const SceneSpec& spec = Cfg().Scenario("toy-faces");
  DatasetOptions opts;
  opts.confounder = "skin_tone";
  opts.confounder_polarity = -1;
  const LabeledDataset d = MakeDataset(Cfg(), "toy-faces", 2000, 0, 1.0, Rng(4), opts);
  CHECK(Agreement(spec, d.train, "skin_tone") == 0.0);
  CHECK(ConfounderAgreement(spec, d.train, "skin_tone", -1) == 1.0);
}

TEST_CASE("labels are recomputable from stored params and images re-render bit-exactly") {
  for (const std::string id : {"toy-faces", "toy-flowers-a", "toy-flowers-b"}) {
    const SceneSpec& spec = Cfg().Scenario(id);
    const LabeledDataset d = MakeDataset(Cfg(), id, 200, 50, 0.5, Rng(5));
    REQUIRE(d.train.size() == 200);
    REQUIRE(d.val.size() == 50);
    for (const auto* split : {&d.train, &d.val}) {
      for (const auto& x : *split) {
        CHECK(x.label == LabelOf(spec, x.params));
        CHECK(x.image == RenderScene(spec, x.params, 64));
        for (std::size_t a = 0; a < spec.attributes.size(); ++a) {
          CHECK(x.params.values[a] >= spec.attributes[a].min);
          CHECK(x.params.values[a] <= spec.attributes[a].max);
        }
      }
    }
    for (const auto& x : d.val) CHECK(x.split == Split::kVal);
  }
}

TEST_CASE("generation is deterministic and order independent") {
  const LabeledDataset a = MakeDataset(Cfg(), "toy-flowers-a", 30, 10, 0.3, Rng(6));
  const LabeledDataset b = MakeDataset(Cfg(), "toy-flowers-a", 60, 10, 0.3, Rng(6));
  for (std::size_t i = 0; i < a.train.size(); ++i) CHECK(a.train[i].params == b.train[i].params);
}

TEST_CASE("label rules") {
  const SceneSpec& faces = Cfg().Scenario("toy-faces");
  CHECK(LabelOf(faces, With(faces, Midpoints(faces), "mouth_curvature", 0.8)) == 1);
  CHECK(LabelOf(faces, With(faces, Midpoints(faces), "mouth_curvature", 0.0)) == -1);
  CHECK(LabelOf(faces, With(faces, Midpoints(faces), "mouth_curvature", -0.3)) == -1);

  const SceneSpec& fa = Cfg().Scenario("toy-flowers-a");
  CHECK(LabelOf(fa, With(fa, Midpoints(fa), "petal_hue", -0.9)) == 1);
  CHECK(LabelOf(fa, With(fa, Midpoints(fa), "petal_hue", 0.9)) == -1);

  // Small dark disc: positive whatever the petal shade.
  const SceneSpec& fb = Cfg().Scenario("toy-flowers-b");
  SceneParams small_dark = With(fb, Midpoints(fb), "disc_radius", 4.0);
  small_dark = With(fb, small_dark, "disc_darkness", 0.9);
  for (double hue = -1.0; hue <= 1.0; hue += 0.25) {
    CHECK(LabelOf(fb, With(fb, small_dark, "petal_hue", hue)) == 1);
  }
  CHECK(LabelOf(fb, With(fb, small_dark, "disc_radius", 9.0)) == -1);
  CHECK(LabelOf(fb, With(fb, small_dark, "disc_darkness", 0.1)) == -1);
  CHECK(LabelOf(fb, With(fb, small_dark, "disc_radius", 6.5)) == -1);
}

TEST_CASE("ordinal bracket of the proxy attribute") {
  const SceneSpec& faces = Cfg().Scenario("toy-faces");
  const AttributeSpec& s = faces.Attribute("face_scale");
  auto at = [&](double value19) {
    return With(faces, Midpoints(faces), "face_scale", s.min + (s.max - s.min) * value19 / 19.0);
  };
  CHECK(BracketOf(faces, at(1.0)) == 0);
  CHECK(BracketOf(faces, at(6.0)) == 1);
  CHECK(BracketOf(faces, at(15.0)) == 2);
  CHECK(BracketValue(faces, at(6.0)) == doctest::Approx(6.0));
  CHECK_THROWS(BracketOf(Cfg().Scenario("toy-flowers-a"), Midpoints(Cfg().Scenario("toy-flowers-a"))));
}

TEST_CASE("export and import round trip bit-exactly") {
  const SceneSpec& spec = Cfg().Scenario("toy-faces");
  const LabeledDataset d = MakeDataset(Cfg(), "toy-faces", 12, 4, 0.95, Rng(8));
  const auto dir = std::filesystem::temp_directory_path() / "styleprobe_dataset_test";
  std::filesystem::remove_all(dir);
  ExportDataset(d, spec, dir.string());
  CHECK(std::filesystem::exists(dir / "manifest.jsonl"));
  const LabeledDataset back = ImportDataset(dir.string(), spec);
  REQUIRE(back.train.size() == d.train.size());
  REQUIRE(back.val.size() == d.val.size());
  for (std::size_t i = 0; i < d.train.size(); ++i) {
    CHECK(back.train[i].label == d.train[i].label);
    CHECK(back.train[i].bracket == d.train[i].bracket);
    CHECK(back.train[i].params == d.train[i].params);
    // PNG holds 8-bit pixels: the imported image is the quantized render.
    CHECK(back.train[i].image == Quantize8(d.train[i].image));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(MakeDataset(Cfg(), "toy-faces", 4, 4, 1.2, Rng(1)), std::invalid_argument);
  CHECK_THROWS_AS(MakeDataset(Cfg(), "toy-faces", 4, 4, -0.1, Rng(1)), std::invalid_argument);
  CHECK_THROWS_AS(MakeDataset(Cfg(), "toy-nothing", 4, 4, 0.0, Rng(1)), std::out_of_range);
}

}  // namespace
}  // namespace styleprobe
