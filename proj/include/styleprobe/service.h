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

#ifndef STYLEPROBE_SERVICE_H_
#define STYLEPROBE_SERVICE_H_

#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "styleprobe/classifier.h"
#include "styleprobe/config.h"
#include "styleprobe/directions.h"
#include "styleprobe/generator.h"
#include "styleprobe/inversion.h"

namespace httplib {
class Server;
}

namespace styleprobe {

struct ApiResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// Error envelope {"code": ..., "message": ...}.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }

 private:
  int status_;
  std::string code_;
};

// Fixed-size pool of threads draining a FIFO task queue.
class WorkerPool {
 public:
  explicit WorkerPool(int threads);
  ~WorkerPool();
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  void Submit(std::function<void()> task);
  int size() const { return static_cast<int>(threads_.size()); }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> queue_;
  bool stopping_ = false;
  std::vector<std::thread> threads_;
};

struct ServiceOptions {
  // When set, GET /sessions/{id}/snapshot also writes <dir>/<id>.json.
  std::string snapshot_dir;
};

// Transport-independent implementation of the explorer HTTP/JSON API.
// Handle() is safe to call concurrently. Session state is mutated under a
// per-session mutex; models, directions and the generator are immutable once
// registered; inversions run on a bounded worker pool.
class ExplorerService {
 public:
  explicit ExplorerService(WorkbenchConfig config, ServiceOptions options = {});
  ~ExplorerService();

  // Loads every model and direction file listed in the config.
  void LoadArtifacts();
  void AddModel(const std::string& id, const std::string& scenario, ClassifierModel model);
  void AddDirection(const std::string& id, const std::string& model_id, DirectionModel direction);

  ApiResponse Handle(const std::string& method, const std::string& path, const std::string& body);

  const Generator& generator() const { return gen_; }
  const WorkbenchConfig& config() const { return gen_.config(); }

  struct ModelEntry {
    std::string scenario;
    ClassifierModel model;
  };
  struct DirectionEntry {
    std::string model_id;
    DirectionModel direction;
  };

  // Score shown for an image: tanh score for binary models, softmax-weighted
  // bracket centre for bracket models. Computed on the 8-bit quantized image.
  double ScoreImage(const ModelEntry& model, const ImageBuffer& image) const;

 private:
  struct GroupChoice;
  struct Session;
  struct JobEntry;

  std::shared_ptr<Session> FindSession(const std::string& id) const;
  const ModelEntry& FindModel(const std::string& id) const;

  std::string CreateSession(const std::string& body);
  std::string GetSession(const std::string& id);
  std::string Generate(const std::string& id, const std::string& body);
  std::string Mix(const std::string& id, const std::string& body);
  std::string Invert(const std::string& id, const std::string& body);
  std::string GetJob(const std::string& id);
  std::string CancelJob(const std::string& id);
  std::string Views(const std::string& id, const std::string& body);
  std::string FitDirectionRequest(const std::string& body);
  std::string ListDirections();
  std::string SweepRequest(const std::string& id, const std::string& body);
  std::string Attribution(const std::string& body);
  std::string ConfigEcho();
  std::string Snapshot(const std::string& id);
  std::string Restore(const std::string& body);

  std::string JobJson(const JobEntry& job) const;

  Generator gen_;
  ServiceOptions options_;

  mutable std::mutex registry_mu_;
  std::map<std::string, ModelEntry> models_;
  std::map<std::string, DirectionEntry> directions_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::map<std::string, std::shared_ptr<JobEntry>> jobs_;
  long next_session_ = 1;
  long next_job_ = 1;
  long next_direction_ = 1;

  WorkerPool pool_;  // last member: joined first on destruction
};

// Binds an ExplorerService to cpp-httplib. Every route is forwarded to
// ExplorerService::Handle; CORS headers allow a browser UI on another origin.
class HttpFrontend {
 public:
  explicit HttpFrontend(ExplorerService& service, int http_threads = 4);
  ~HttpFrontend();

  // Port 0 binds an ephemeral port. Returns the bound port, or -1.
  int Bind(const std::string& host, int port);
  void Run();  // blocks until Stop()
  void Stop();

 private:
  ExplorerService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace styleprobe

#endif  // STYLEPROBE_SERVICE_H_
