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

#include "styleprobe/inversion.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "styleprobe/adam.h"
#include "styleprobe/render.h"
#include "styleprobe/scene.h"

namespace styleprobe {
namespace {

double Mse(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

StyleVector ToStyle(const std::vector<double>& u) {
  const double edge = std::nextafter(1.0, 0.0);
  StyleVector w;
  w.values.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) w.values[i] = std::clamp(std::tanh(u[i]), -edge, edge);
  return w;
}

struct Evaluation {
  double loss = 0.0;
  std::vector<double> grad_u;
};

// Loss at w and its gradient w.r.t. the unconstrained parameters u, where
// w = tanh(u). The loss is taken on the plain render so it matches the
// re-synthesized image exactly.
Evaluation Evaluate(const Generator& gen, const SceneSpec& spec, const ImageBuffer& target, const StyleVector& w,
                    ReconstructionLoss mode) {
  const SceneParams params = DecodeStyle(spec, w);
  const RenderJacobian jac = RenderSceneJacobian(spec, params, gen.image_size());
  Evaluation ev;
  ev.loss = ReconstructionError(target, RenderScene(spec, params, gen.image_size()), mode);
  const std::vector<double> r = ReconstructionErrorGradient(target, jac.image, mode);
  ev.grad_u.assign(w.size(), 0.0);
  for (std::size_t a = 0; a < spec.attributes.size(); ++a) {
    const auto& attr = spec.attributes[a];
    const auto& d = jac.d_attribute[a];
    double g = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) g += r[i] * d[i];
    const auto c = static_cast<std::size_t>(attr.component);
    const double wc = w.values[c];
    ev.grad_u[c] = g * AttributeStyleDerivative(attr, wc) * (1.0 - wc * wc);
  }
  return ev;
}


}  // namespace

double ReconstructionError(const ImageBuffer& target, const ImageBuffer& candidate, ReconstructionLoss mode) {
  RequireSameShape(target, candidate, "reconstruction_loss");
  double loss = Mse(target.data, candidate.data);
  if (mode == ReconstructionLoss::kMseHalfScale) {
    loss += Mse(Downsample2x(target).data, Downsample2x(candidate).data);
  }
  return loss;
}

std::vector<double> ReconstructionErrorGradient(const ImageBuffer& target, const ImageBuffer& candidate,
                                                ReconstructionLoss mode) {
  RequireSameShape(target, candidate, "reconstruction_loss");
  const double n = static_cast<double>(candidate.data.size());
  std::vector<double> g(candidate.data.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 2.0 * (candidate.data[i] - target.data[i]) / n;
  if (mode == ReconstructionLoss::kMseHalfScale) {
    const ImageBuffer dt = Downsample2x(target);
    const ImageBuffer dc = Downsample2x(candidate);
    const double nh = static_cast<double>(dc.data.size());
    for (int y = 0; y < dc.height; ++y) {
      for (int x = 0; x < dc.width; ++x) {
        for (int c = 0; c < 3; ++c) {
          const double gh = 0.25 * 2.0 * (dc.at(y, x, c) - dt.at(y, x, c)) / nh;
          g[candidate.index(2 * y, 2 * x, c)] += gh;
          g[candidate.index(2 * y, 2 * x + 1, c)] += gh;
          g[candidate.index(2 * y + 1, 2 * x, c)] += gh;
          g[candidate.index(2 * y + 1, 2 * x + 1, c)] += gh;
        }
      }
    }
  }
  return g;
}

void InversionConfig::Validate() const {
  if (restarts < 1) throw std::invalid_argument("inversion: restarts must be >= 1");
  if (steps < 0) throw std::invalid_argument("inversion: steps must be >= 0");
  if (!(lr > 0.0)) throw std::invalid_argument("inversion: lr must be > 0");
}

std::optional<InversionResult> Invert(const Generator& gen, const ImageBuffer& target,
                                      const std::string& scenario, const InversionConfig& cfg,
                                      const InversionCallback& callback) {
  cfg.Validate();
  if (target.height != gen.image_size() || target.width != gen.image_size()) {
    throw std::invalid_argument("invert: target must be " + std::to_string(gen.image_size()) + "x" +
                                std::to_string(gen.image_size()));
  }
  const SceneSpec& spec = gen.scenario(scenario);
  const Rng base(cfg.seed);
  const double total_steps = static_cast<double>(cfg.restarts) * std::max(cfg.steps, 1);

  InversionResult best;
  best.final_loss = std::numeric_limits<double>::infinity();
  double done_steps = 0.0;

  for (int restart = 0; restart < cfg.restarts; ++restart) {
    StyleVector w0;
    if (restart == 0 && cfg.initial_style) {
      w0 = *cfg.initial_style;
      if (static_cast<int>(w0.size()) != gen.style_dim() || !w0.InOpenCube()) {
        throw std::invalid_argument("invert: initial style must lie inside (-1,1)^d'");
      }
    } else {
      Rng rng = base.Derive("restart", static_cast<std::uint64_t>(restart));
      w0 = gen.RandomStyle(rng);
    }
    std::vector<double> u(w0.values.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::atanh(w0.values[i]);

    AdamState opt = AdamState::Fresh(u.size(), cfg.lr);
    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(cfg.steps) + 1);
    double run_best = std::numeric_limits<double>::infinity();
    StyleVector run_best_w = w0;
    for (int step = 0; step <= cfg.steps; ++step) {
      // The starting point is evaluated as given, not through atanh/tanh.
      const StyleVector w = step == 0 ? w0 : ToStyle(u);
      const Evaluation ev = Evaluate(gen, spec, target, w, cfg.loss);
      if (ev.loss < run_best) {
        run_best = ev.loss;
        run_best_w = w;
      }
      trace.push_back(run_best);
      if (step == cfg.steps) break;
      opt.Apply(u, ev.grad_u);
      done_steps += 1.0;
      if (callback) {
        const double best_so_far = std::min(best.final_loss, run_best);
        if (!callback({done_steps / total_steps, best_so_far})) return std::nullopt;
      }
    }
    best.restart_losses.push_back(run_best);
    if (run_best < best.final_loss) {
      best.final_loss = run_best;
      best.loss_trace = std::move(trace);
      best.w = run_best_w;
    }
    if (cfg.steps == 0 && callback) {
      done_steps += 1.0;
      if (!callback({done_steps / total_steps, best.final_loss})) return std::nullopt;
    }
  }
  best.reconstructed = gen.SynthesizeStyle(best.w, scenario);
  return best;
}

InversionResult Invert(const Generator& gen, const ImageBuffer& target, const std::string& scenario,
                       const InversionConfig& cfg) {
  return *Invert(gen, target, scenario, cfg, InversionCallback{});
}

const char* JobStateName(JobState s) {
  switch (s) {
    case JobState::kPending: return "pending";
    case JobState::kRunning: return "running";
    case JobState::kDone: return "done";
    case JobState::kCancelled: return "cancelled";
    case JobState::kFailed: return "failed";
  }
  return "unknown";
}

InversionJob::InversionJob(const Generator& gen, ImageBuffer target, std::string scenario, InversionConfig cfg)
    : gen_(gen), target_(std::move(target)), scenario_(std::move(scenario)), cfg_(std::move(cfg)) {}

void InversionJob::Run() {
  {
    std::lock_guard lock(mu_);
    if (snapshot_.state != JobState::kPending) return;
    if (cancel_requested_) {
      snapshot_.state = JobState::kCancelled;
      cv_.notify_all();
      return;
    }
    snapshot_.state = JobState::kRunning;
  }
  try {
    auto result = Invert(gen_, target_, scenario_, cfg_, [this](const InversionProgress& p) {
      std::lock_guard lock(mu_);
      snapshot_.progress = std::max(snapshot_.progress, p.fraction);
      snapshot_.best_loss = p.best_loss;
      return !cancel_requested_.load();
    });
    std::lock_guard lock(mu_);
    if (result) {
      snapshot_.progress = 1.0;
      snapshot_.best_loss = result->final_loss;
      snapshot_.result = std::move(result);
      snapshot_.state = JobState::kDone;
    } else {
      snapshot_.state = JobState::kCancelled;
    }
  } catch (const std::exception& e) {
    std::lock_guard lock(mu_);
    snapshot_.state = JobState::kFailed;
    snapshot_.error = e.what();
  }
  cv_.notify_all();
}

void InversionJob::Cancel() {
  cancel_requested_ = true;
  std::lock_guard lock(mu_);
  if (snapshot_.state == JobState::kPending) {
    snapshot_.state = JobState::kCancelled;
    cv_.notify_all();
  }
}

JobSnapshot InversionJob::Snapshot() const {
  std::lock_guard lock(mu_);
  return snapshot_;
}

bool InversionJob::Finished() const {
  std::lock_guard lock(mu_);
  return snapshot_.state != JobState::kPending && snapshot_.state != JobState::kRunning;
}

JobSnapshot InversionJob::Wait() const {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] {
    return snapshot_.state != JobState::kPending && snapshot_.state != JobState::kRunning;
  });
  return snapshot_;
}

}  // namespace styleprobe
