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

#ifndef STYLEPROBE_INVERSION_H_
#define STYLEPROBE_INVERSION_H_

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "styleprobe/generator.h"
#include "styleprobe/image.h"
#include "styleprobe/style.h"

namespace styleprobe {

enum class ReconstructionLoss { kMse, kMseHalfScale };

// mse: mean squared per-value error. mse+halfscale adds the mse of the 2x
// box-downsampled pair. Throws std::invalid_argument on a size mismatch.
double ReconstructionError(const ImageBuffer& target, const ImageBuffer& candidate,
                           ReconstructionLoss mode = ReconstructionLoss::kMse);
// d loss / d candidate.
std::vector<double> ReconstructionErrorGradient(const ImageBuffer& target, const ImageBuffer& candidate,
                                                ReconstructionLoss mode);

struct InversionConfig {
  int restarts = 8;
  int steps = 300;
  double lr = 0.05;
  ReconstructionLoss loss = ReconstructionLoss::kMse;
  std::uint64_t seed = 0;
  // Optional starting style for the first restart (the remaining restarts
  // still draw random starts).
  std::optional<StyleVector> initial_style;

  void Validate() const;
};

struct InversionResult {
  StyleVector w;
  double final_loss = 0.0;
  // Best-so-far loss of the winning restart, one entry per evaluation
  // (initial point plus one per step). final_loss == loss_trace.back().
  std::vector<double> loss_trace;
  ImageBuffer reconstructed;  // Synthesize(all layers Single(w))
  std::vector<double> restart_losses;
};

struct InversionProgress {
  double fraction = 0.0;  // completed steps / total steps
  double best_loss = 0.0;
};

// Return false to cancel.
using InversionCallback = std::function<bool(const InversionProgress&)>;

// Adam descent over a shared style w from `restarts` random starts
// (w = map_latent(z), z ~ N(0, I)). w is parameterized as tanh(u) so every
// iterate stays inside the open cube; the gradient chains the loss through
// the render Jacobian, the attribute decode and tanh. Returns nullopt only
// when the callback cancels. Throws std::invalid_argument when the target
// size differs from the generator's.
std::optional<InversionResult> Invert(const Generator& gen, const ImageBuffer& target,
                                      const std::string& scenario, const InversionConfig& cfg,
                                      const InversionCallback& callback);
InversionResult Invert(const Generator& gen, const ImageBuffer& target, const std::string& scenario,
                       const InversionConfig& cfg = {});

enum class JobState { kPending, kRunning, kDone, kCancelled, kFailed };
const char* JobStateName(JobState s);

struct JobSnapshot {
  JobState state = JobState::kPending;
  double progress = 0.0;
  double best_loss = 0.0;
  std::optional<InversionResult> result;  // present iff state == kDone
  std::string error;
};

// Asynchronous inversion. Run() performs the work on the calling thread, so
// the owner decides where it executes (a worker pool or a dedicated thread).
// Progress never decreases; Cancel() is honoured at the next step.
class InversionJob {
 public:
  InversionJob(const Generator& gen, ImageBuffer target, std::string scenario, InversionConfig cfg);

  void Run();
  void Cancel();
  JobSnapshot Snapshot() const;
  // Blocks until the job leaves the pending/running states.
  JobSnapshot Wait() const;
  bool Finished() const;

 private:
  const Generator& gen_;
  ImageBuffer target_;
  std::string scenario_;
  InversionConfig cfg_;
  std::atomic<bool> cancel_requested_{false};
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  JobSnapshot snapshot_;
};

}  // namespace styleprobe

#endif  // STYLEPROBE_INVERSION_H_
