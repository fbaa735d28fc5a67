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

#include "styleprobe/service.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "styleprobe/attribution.h"
#include "styleprobe/image_io.h"
#include "styleprobe/scene.h"

namespace styleprobe {

using nlohmann::json;

namespace {

constexpr std::uint64_t kSessionSeed = 0x5e55105eedULL;

std::vector<std::string> SplitPath(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '?') break;
    if (c == '/') {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  return parts;
}

json ParseBody(const std::string& body) {
  if (body.empty()) return json::object();
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw ApiError(400, "invalid_json", "request body is not valid JSON");
  if (!j.is_object()) throw ApiError(400, "invalid_json", "request body must be a JSON object");
  return j;
}

ApiResponse ErrorResponse(int status, const std::string& code, const std::string& message) {
  return {status, json{{"code", code}, {"message", message}}.dump()};
}

json StyleJson(const StyleVector& w) { return w.values; }

StyleVector StyleFromJson(const json& j, int dim) {
  StyleVector w{j.get<std::vector<double>>()};
  if (static_cast<int>(w.size()) != dim || !w.InOpenCube()) {
    throw ApiError(400, "invalid_style", "style must have " + std::to_string(dim) + " components inside (-1,1)");
  }
  return w;
}

ImageBuffer DecodeUpload(const json& j, int size) {
  if (!j.contains("image") || !j.at("image").is_string()) {
    throw ApiError(400, "undecodable_image", "field 'image' must hold a base64 PNG");
  }
  ImageBuffer img;
  try {
    img = DecodePngBase64(j.at("image").get<std::string>());
  } catch (const std::exception& e) {
    throw ApiError(400, "undecodable_image", e.what());
  }
  if (img.height != size || img.width != size) {
    throw ApiError(400, "wrong_image_size", "image must be " + std::to_string(size) + "x" + std::to_string(size));
  }
  return img;
}

json RawArray(const AttributionMap& a) {
  json rows = json::array();
  for (int y = 0; y < a.height; ++y) {
    json row = json::array();
    for (int x = 0; x < a.width; ++x) {
      const std::size_t i = (static_cast<std::size_t>(y) * a.width + x) * 3;
      row.push_back({a.data[i], a.data[i + 1], a.data[i + 2]});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

WorkerPool::WorkerPool(int threads) {
  if (threads < 1) throw std::invalid_argument("worker pool needs at least one thread");
  for (int i = 0; i < threads; ++i) {
    threads_.emplace_back([this] {
      for (;;) {
        std::function<void()> task;
        {
          std::unique_lock lock(mu_);
          cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
          if (queue_.empty()) return;
          task = std::move(queue_.front());
          queue_.pop_front();
        }
        task();
      }
    });
  }
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerPool::Submit(std::function<void()> task) {
  {
    std::lock_guard lock(mu_);
    if (stopping_) throw std::runtime_error("worker pool is shutting down");
    queue_.push_back(std::move(task));
  }
  cv_.notify_one();
}

struct ExplorerService::GroupChoice {
  std::string a;
  std::string b;  // empty for a single style
  double alpha = 0.0;

  bool blend() const { return !b.empty(); }

  json ToJson() const {
    if (!blend()) return {{"kind", "single"}, {"slot", a}};
    return {{"kind", "blend"}, {"a", a}, {"b", b}, {"alpha", alpha}};
  }

  static GroupChoice FromJson(const json& j) {
    GroupChoice c;
    if (j.is_string()) {
      c.a = j.get<std::string>();
      return c;
    }
    if (!j.is_object()) throw ApiError(400, "invalid_assignment", "group choice must be an object or slot name");
    const std::string kind = j.value("kind", j.contains("slot") ? "single" : "blend");
    if (kind == "single") {
      c.a = j.at("slot").get<std::string>();
    } else if (kind == "blend") {
      c.a = j.at("a").get<std::string>();
      c.b = j.at("b").get<std::string>();
      c.alpha = j.at("alpha").get<double>();
      if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) {
        throw ApiError(400, "invalid_alpha", "alpha must lie in [0, 1]");
      }
    } else {
      throw ApiError(400, "invalid_assignment", "unknown group choice kind '" + kind + "'");
    }
    return c;
  }
};

struct ExplorerService::Session {
  std::mutex mu;
  std::string id;
  std::string scenario;
  std::string model_id;
  std::vector<std::string> slot_order;
  std::map<std::string, StyleVector> slots;
  std::vector<GroupChoice> assignment;
  std::vector<std::pair<json, double>> history;
  long slot_counter = 0;
  long generate_counter = 0;
  long invert_counter = 0;
  std::string active_job;

  const StyleVector& Slot(const std::string& name) const {
    auto it = slots.find(name);
    if (it == slots.end()) throw ApiError(404, "unknown_slot", "no slot named '" + name + "'");
    return it->second;
  }

  void AddSlot(const std::string& name, StyleVector w) {
    if (slots.emplace(name, std::move(w)).second) slot_order.push_back(name);
  }

  LayerAssignment Expand(const std::vector<GroupChoice>& choices, const LayerGrouping& grouping) const {
    if (static_cast<int>(choices.size()) != grouping.num_groups()) {
      throw ApiError(400, "invalid_assignment",
                     "assignment needs one choice per layer group (" + std::to_string(grouping.num_groups()) + ")");
    }
    std::vector<LayerStyle> per_group;
    for (const auto& c : choices) {
      if (c.blend()) {
        per_group.push_back(BlendStyle{Slot(c.a), Slot(c.b), c.alpha});
      } else {
        per_group.push_back(SingleStyle{Slot(c.a)});
      }
    }
    return grouping.Expand(per_group);
  }

  json AssignmentJson() const {
    json a = json::array();
    for (const auto& c : assignment) a.push_back(c.ToJson());
    return a;
  }
};

struct ExplorerService::JobEntry {
  std::string id;
  std::string session_id;
  std::shared_ptr<InversionJob> job;
  mutable std::mutex mu;
  bool finalized = false;
  bool queued = true;
  std::string slot;
  double score = 0.0;
};

ExplorerService::ExplorerService(WorkbenchConfig config, ServiceOptions options)
    : gen_(std::move(config)), options_(std::move(options)), pool_(gen_.config().interface.worker_threads) {}

ExplorerService::~ExplorerService() {
  std::lock_guard lock(registry_mu_);
  for (auto& [id, job] : jobs_) job->job->Cancel();
}

void ExplorerService::LoadArtifacts() {
  for (const auto& m : config().models) AddModel(m.id, m.scenario, ClassifierModel::Load(m.path));
  for (const auto& d : config().directions) AddDirection(d.id, d.model_id, DirectionModel::Load(d.path));
}

void ExplorerService::AddModel(const std::string& id, const std::string& scenario, ClassifierModel model) {
  const SceneSpec& spec = gen_.scenario(scenario);
  const auto& arch = model.architecture();
  if (arch.image_size != gen_.image_size()) throw std::invalid_argument("model '" + id + "' has the wrong input size");
  if (arch.head == HeadKind::kBrackets &&
      (!spec.brackets || static_cast<int>(spec.brackets->centers.size()) != arch.num_brackets)) {
    throw std::invalid_argument("bracket model '" + id + "' does not match the scenario's brackets");
  }
  std::lock_guard lock(registry_mu_);
  if (!models_.emplace(id, ModelEntry{scenario, std::move(model)}).second) {
    throw std::invalid_argument("model '" + id + "' is already registered");
  }
}

void ExplorerService::AddDirection(const std::string& id, const std::string& model_id, DirectionModel direction) {
  if (static_cast<int>(direction.u.size()) != gen_.style_dim()) {
    throw std::invalid_argument("direction '" + id + "' has the wrong dimension");
  }
  std::lock_guard lock(registry_mu_);
  if (!directions_.emplace(id, DirectionEntry{model_id, std::move(direction)}).second) {
    throw std::invalid_argument("direction '" + id + "' is already registered");
  }
}

double ExplorerService::ScoreImage(const ModelEntry& entry, const ImageBuffer& image) const {
  const ImageBuffer q = Quantize8(image);
  if (entry.model.architecture().head == HeadKind::kBinary) return Score(entry.model, q);
  const auto& rule = *gen_.scenario(entry.scenario).brackets;
  return ContinuousScore(entry.model, q, BracketSpec{rule.lower_bounds, rule.upper_bounds, rule.centers});
}

std::shared_ptr<ExplorerService::Session> ExplorerService::FindSession(const std::string& id) const {
  std::lock_guard lock(registry_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ApiError(404, "unknown_session", "no session '" + id + "'");
  return it->second;
}

const ExplorerService::ModelEntry& ExplorerService::FindModel(const std::string& id) const {
  std::lock_guard lock(registry_mu_);
  auto it = models_.find(id);
  if (it == models_.end()) throw ApiError(404, "unknown_model", "no model '" + id + "'");
  return it->second;
}

ApiResponse ExplorerService::Handle(const std::string& method, const std::string& path, const std::string& body) {
  const auto p = SplitPath(path);
  const auto n = p.size();
  auto is = [&](const char* m) { return method == m; };
  try {
    if (n == 1 && p[0] == "config") {
      if (is("GET")) return {200, ConfigEcho()};
    } else if (n == 1 && p[0] == "sessions") {
      if (is("POST")) return {200, CreateSession(body)};
    } else if (n == 2 && p[0] == "sessions" && p[1] == "restore") {
      if (is("POST")) return {200, Restore(body)};
    } else if (n == 2 && p[0] == "sessions") {
      if (is("GET")) return {200, GetSession(p[1])};
    } else if (n == 3 && p[0] == "sessions") {
      const std::string& op = p[2];
      if (op == "snapshot" && is("GET")) return {200, Snapshot(p[1])};
      if (is("POST")) {
        if (op == "generate") return {200, Generate(p[1], body)};
        if (op == "mix") return {200, Mix(p[1], body)};
        if (op == "invert") return {202, Invert(p[1], body)};
        if (op == "views") return {200, Views(p[1], body)};
        if (op == "sweep") return {200, SweepRequest(p[1], body)};
      }
      if (op != "snapshot" && op != "generate" && op != "mix" && op != "invert" && op != "views" && op != "sweep") {
        return ErrorResponse(404, "not_found", "no route " + path);
      }
    } else if (n == 2 && p[0] == "jobs") {
      if (is("GET")) return {200, GetJob(p[1])};
      if (is("DELETE")) return {200, CancelJob(p[1])};
    } else if (n == 3 && p[0] == "jobs" && p[2] == "cancel") {
      if (is("POST")) return {200, CancelJob(p[1])};
    } else if (n == 1 && p[0] == "directions") {
      if (is("GET")) return {200, ListDirections()};
    } else if (n == 2 && p[0] == "directions" && p[1] == "fit") {
      if (is("POST")) return {200, FitDirectionRequest(body)};
    } else if (n == 1 && p[0] == "attribution") {
      if (is("POST")) return {200, Attribution(body)};
    } else {
      return ErrorResponse(404, "not_found", "no route " + path);
    }
    return ErrorResponse(405, "method_not_allowed", method + " not allowed on " + path);
  } catch (const ApiError& e) {
    return ErrorResponse(e.status(), e.code(), e.what());
  } catch (const json::exception& e) {
    return ErrorResponse(400, "invalid_request", e.what());
  } catch (const std::invalid_argument& e) {
    return ErrorResponse(400, "invalid_request", e.what());
  } catch (const std::exception& e) {
    return ErrorResponse(500, "internal", e.what());
  }
}

std::string ExplorerService::ConfigEcho() {
  const auto& geo = gen_.geometry();
  json groups = json::array();
  for (int g = 0; g < geo.grouping.num_groups(); ++g) {
    groups.push_back({{"name", g < static_cast<int>(geo.grouping.names().size()) ? geo.grouping.names()[g]
                                                                                   : "group" + std::to_string(g + 1)},
                      {"first_layer", geo.grouping.first_layer(g) + 1},
                      {"last_layer", geo.grouping.last_layer(g) + 1}});
  }
  json scenarios = json::array();
  for (const auto& s : config().scenarios) {
    json attrs = json::array();
    for (const auto& a : s.attributes) {
      attrs.push_back({{"name", a.name}, {"layer", a.layer + 1}, {"component", a.component}, {"min", a.min},
                       {"max", a.max}});
    }
    scenarios.push_back({{"id", s.id}, {"renderer", s.renderer}, {"attributes", attrs}});
  }
  json models = json::array();
  json directions = json::array();
  {
    std::lock_guard lock(registry_mu_);
    for (const auto& [id, m] : models_) {
      const auto& arch = m.model.architecture();
      models.push_back({{"id", id},
                        {"scenario", m.scenario},
                        {"head", arch.head == HeadKind::kBinary ? "binary" : "brackets"},
                        {"num_brackets", arch.num_brackets}});
    }
    for (const auto& [id, d] : directions_) directions.push_back({{"id", id}, {"model_id", d.model_id}});
  }
  return json{{"num_layers", geo.num_layers},
              {"latent_dim", geo.latent_dim},
              {"style_dim", geo.style_dim},
              {"grouping", groups},
              {"image_size", geo.image_size},
              {"grid_count", config().interface.grid_count},
              {"default_lambdas", DefaultSweepLambdas()},
              {"scenarios", scenarios},
              {"models", models},
              {"directions", directions}}
      .dump();
}

std::string ExplorerService::CreateSession(const std::string& body) {
  const json j = ParseBody(body);
  const std::string scenario = j.at("scenario").get<std::string>();
  const std::string model_id = j.at("model_id").get<std::string>();
  if (!config().HasScenario(scenario)) throw ApiError(404, "unknown_scenario", "no scenario '" + scenario + "'");
  const ModelEntry& model = FindModel(model_id);
  if (model.scenario != scenario) {
    throw ApiError(400, "model_scenario_mismatch", "model '" + model_id + "' belongs to " + model.scenario);
  }
  auto s = std::make_shared<Session>();
  s->scenario = scenario;
  s->model_id = model_id;
  // Canonical z = 0 style.
  s->AddSlot("base", gen_.MapLatent(LatentCode{std::vector<double>(gen_.geometry().latent_dim, 0.0)}));
  s->assignment.assign(gen_.geometry().grouping.num_groups(), GroupChoice{"base", "", 0.0});
  {
    std::lock_guard lock(registry_mu_);
    do {
      s->id = "session-" + std::to_string(next_session_++);
    } while (sessions_.count(s->id));
    sessions_[s->id] = s;
  }
  return GetSession(s->id);
}

std::string ExplorerService::GetSession(const std::string& id) {
  auto s = FindSession(id);
  const ModelEntry& model = FindModel(s->model_id);
  std::lock_guard lock(s->mu);
  const auto& grouping = gen_.geometry().grouping;
  const ImageBuffer image = gen_.Synthesize(s->Expand(s->assignment, grouping), s->scenario);
  json slots = json::array();
  for (const auto& name : s->slot_order) slots.push_back({{"name", name}, {"style", StyleJson(s->slots.at(name))}});
  json history = json::array();
  for (const auto& [a, score] : s->history) history.push_back({{"assignment", a}, {"score", score}});
  return json{{"id", s->id},
              {"scenario", s->scenario},
              {"model_id", s->model_id},
              {"slots", slots},
              {"assignment", s->AssignmentJson()},
              {"image", EncodePngBase64(image)},
              {"score", ScoreImage(model, image)},
              {"history", history},
              {"active_job", s->active_job.empty() ? json(nullptr) : json(s->active_job)}}
      .dump();
}

std::string ExplorerService::Generate(const std::string& id, const std::string& body) {
  const json j = ParseBody(body);
  auto s = FindSession(id);
  const ModelEntry& model = FindModel(s->model_id);
  const int count = j.value("count", config().interface.grid_count);
  if (count < 1) throw ApiError(400, "invalid_count", "count must be >= 1");
  std::lock_guard lock(s->mu);
  const Rng rng = j.contains("seed") ? Rng(j.at("seed").get<std::uint64_t>())
                                     : Rng(kSessionSeed).Derive("generate", static_cast<std::uint64_t>(s->generate_counter));
  ++s->generate_counter;
  struct Item {
    std::string slot;
    ImageBuffer image;
    double score;
  };
  std::vector<Item> items;
  for (int i = 0; i < count; ++i) {
    Rng r = rng.Derive("slot", static_cast<std::uint64_t>(i));
    StyleVector w = gen_.RandomStyle(r);
    ImageBuffer image = gen_.SynthesizeStyle(w, s->scenario);
    const double score = ScoreImage(model, image);
    const std::string name = "s" + std::to_string(++s->slot_counter);
    s->AddSlot(name, std::move(w));
    items.push_back({name, std::move(image), score});
  }
  std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.score > b.score; });
  json out = json::array();
  for (const auto& it : items) out.push_back({{"slot", it.slot}, {"image", EncodePngBase64(it.image)}, {"score", it.score}});
  return json{{"items", out}}.dump();
}

std::string ExplorerService::Mix(const std::string& id, const std::string& body) {
  const json j = ParseBody(body);
  auto s = FindSession(id);
  const ModelEntry& model = FindModel(s->model_id);
  std::vector<GroupChoice> choices;
  for (const auto& c : j.at("assignment")) choices.push_back(GroupChoice::FromJson(c));
  std::lock_guard lock(s->mu);
  const ImageBuffer image = gen_.Synthesize(s->Expand(choices, gen_.geometry().grouping), s->scenario);
  const double score = ScoreImage(model, image);
  s->assignment = std::move(choices);
  s->history.emplace_back(s->AssignmentJson(), score);
  return json{{"image", EncodePngBase64(image)}, {"score", score}, {"history_length", s->history.size()}}.dump();
}

std::string ExplorerService::Invert(const std::string& id, const std::string& body) {
  const json j = ParseBody(body);
  auto s = FindSession(id);
  const ImageBuffer target = DecodeUpload(j, gen_.image_size());
  InversionConfig cfg;
  cfg.restarts = j.value("restarts", cfg.restarts);
  cfg.steps = j.value("steps", cfg.steps);
  cfg.lr = j.value("lr", cfg.lr);
  cfg.seed = j.value("seed", cfg.seed);
  const std::string loss = j.value("loss", std::string("mse"));
  if (loss == "mse+halfscale") {
    cfg.loss = ReconstructionLoss::kMseHalfScale;
  } else if (loss != "mse") {
    throw ApiError(400, "invalid_loss", "loss must be 'mse' or 'mse+halfscale'");
  }
  if (cfg.restarts < 1 || cfg.steps < 1 || !(cfg.lr > 0.0)) {
    throw ApiError(400, "invalid_request", "restarts and steps must be >= 1 and lr > 0");
  }

  auto entry = std::make_shared<JobEntry>();
  entry->session_id = s->id;
  entry->job = std::make_shared<InversionJob>(gen_, target, s->scenario, cfg);
  {
    std::lock_guard lock(s->mu);
    if (!s->active_job.empty()) {
      throw ApiError(409, "job_active", "session already has an active inversion job '" + s->active_job + "'");
    }
    {
      std::lock_guard reg(registry_mu_);
      entry->id = "job-" + std::to_string(next_job_++);
      jobs_[entry->id] = entry;
    }
    s->active_job = entry->id;
  }
  pool_.Submit([this, entry, s] {
    {
      std::lock_guard lock(entry->mu);
      entry->queued = false;
    }
    entry->job->Run();
    const JobSnapshot snap = entry->job->Snapshot();
    std::lock_guard lock(s->mu);
    std::lock_guard job_lock(entry->mu);
    if (snap.state == JobState::kDone) {
      entry->slot = "inv" + std::to_string(++s->invert_counter);
      s->AddSlot(entry->slot, snap.result->w);
      entry->score = ScoreImage(FindModel(s->model_id), snap.result->reconstructed);
    }
    entry->finalized = true;
    if (s->active_job == entry->id) s->active_job.clear();
  });
  return JobJson(*entry);
}

std::string ExplorerService::JobJson(const JobEntry& entry) const {
  const JobSnapshot snap = entry.job->Snapshot();
  std::lock_guard lock(entry.mu);
  json j = {{"id", entry.id},
            {"kind", "inversion"},
            {"session_id", entry.session_id},
            {"state", entry.finalized ? JobStateName(snap.state) : "running"},
            {"queued", !entry.finalized && entry.queued},
            {"progress", entry.finalized && snap.state == JobState::kDone ? 1.0 : snap.progress},
            {"best_loss", snap.best_loss}};
  if (entry.finalized && snap.state == JobState::kDone) {
    j["result"] = {{"slot", entry.slot},
                   {"final_loss", snap.result->final_loss},
                   {"style", StyleJson(snap.result->w)},
                   {"image", EncodePngBase64(snap.result->reconstructed)},
                   {"score", entry.score}};
  }
  if (entry.finalized && snap.state == JobState::kFailed) j["error"] = snap.error;
  return j.dump();
}

std::string ExplorerService::GetJob(const std::string& id) {
  std::shared_ptr<JobEntry> entry;
  {
    std::lock_guard lock(registry_mu_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) throw ApiError(404, "unknown_job", "no job '" + id + "'");
    entry = it->second;
  }
  return JobJson(*entry);
}

std::string ExplorerService::CancelJob(const std::string& id) {
  std::shared_ptr<JobEntry> entry;
  {
    std::lock_guard lock(registry_mu_);
    auto it = jobs_.find(id);
    if (it == jobs_.end()) throw ApiError(404, "unknown_job", "no job '" + id + "'");
    entry = it->second;
  }
  entry->job->Cancel();
  return JobJson(*entry);
}

std::string ExplorerService::Views(const std::string& id, const std::string& body) {
  const json j = ParseBody(body);
  const std::string mode = j.value("mode", std::string("result"));
  if (mode != "result" && mode != "style") throw ApiError(400, "invalid_mode", "mode must be 'result' or 'style'");
  auto s = FindSession(id);
  const ModelEntry& model = FindModel(s->model_id);
  std::lock_guard lock(s->mu);
  const auto& grouping = gen_.geometry().grouping;
  json out = json::array();
  for (int g = 0; g < grouping.num_groups(); ++g) {
    for (const auto& name : s->slot_order) {
      ImageBuffer image;
      if (mode == "style") {
        image = gen_.SynthesizeStyle(s->slots.at(name), s->scenario);
      } else {
        std::vector<GroupChoice> choices = s->assignment;
        choices[g] = GroupChoice{name, "", 0.0};
        image = gen_.Synthesize(s->Expand(choices, grouping), s->scenario);
      }
      out.push_back({{"group", g}, {"slot", name}, {"image", EncodePngBase64(image)}, {"score", ScoreImage(model, image)}});
    }
  }
  return json{{"mode", mode}, {"thumbnails", out}}.dump();
}

std::string ExplorerService::FitDirectionRequest(const std::string& body) {
  const json j = ParseBody(body);
  const std::string model_id = j.at("model_id").get<std::string>();
  const ModelEntry& model = FindModel(model_id);
  if (model.model.architecture().head != HeadKind::kBinary) {
    throw ApiError(422, "unsupported_model", "directions need a binary classifier");
  }
  const json c = j.value("config", json::object());
  const int n_train = c.value("n_train", config().interface.latent_train);
  const int n_val = c.value("n_val", config().interface.latent_val);
  if (n_train < 1 || n_val < 1) throw ApiError(400, "invalid_request", "n_train and n_val must be >= 1");
  DirectionFitConfig fit;
  fit.lr = c.value("lr", fit.lr);
  fit.batch_size = c.value("batch_size", fit.batch_size);
  fit.max_epochs = c.value("max_epochs", fit.max_epochs);
  fit.patience = c.value("patience", fit.patience);
  fit.seed = c.value("seed", fit.seed);
  const LatentDataset data =
      SampleLatentDataset(gen_, model.model, model.scenario, n_train, n_val, Rng(c.value("sample_seed", fit.seed)));
  DirectionModel dir;
  try {
    dir = FitDirection(data, fit, c.value("attribute", std::string()));
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    if (what.find("single class") != std::string::npos) throw ApiError(422, "single_class", what);
    throw ApiError(400, "invalid_request", what);
  }
  std::string id;
  {
    std::lock_guard lock(registry_mu_);
    do {
      id = "direction-" + std::to_string(next_direction_++);
    } while (directions_.count(id));
    directions_[id] = DirectionEntry{model_id, dir};
  }
  return json{{"direction_id", id},
              {"model_id", model_id},
              {"u", dir.u},
              {"bias", dir.bias},
              {"train_accuracy", dir.train_accuracy},
              {"val_accuracy", dir.val_accuracy},
              {"epochs", dir.epochs}}
      .dump();
}

std::string ExplorerService::ListDirections() {
  std::lock_guard lock(registry_mu_);
  json out = json::array();
  for (const auto& [id, d] : directions_) {
    out.push_back({{"id", id}, {"model_id", d.model_id}, {"attribute", d.direction.attribute},
                   {"val_accuracy", d.direction.val_accuracy}});
  }
  return json{{"directions", out}}.dump();
}

std::string ExplorerService::SweepRequest(const std::string& id, const std::string& body) {
  const json j = ParseBody(body);
  auto s = FindSession(id);
  const ModelEntry& model = FindModel(s->model_id);
  if (model.model.architecture().head != HeadKind::kBinary) {
    throw ApiError(422, "unsupported_model", "sweeps need a binary classifier");
  }
  const std::string direction_id = j.at("direction_id").get<std::string>();
  DirectionModel dir;
  {
    std::lock_guard lock(registry_mu_);
    auto it = directions_.find(direction_id);
    if (it == directions_.end()) throw ApiError(404, "unknown_direction", "no direction '" + direction_id + "'");
    dir = it->second.direction;
  }
  const std::vector<double> lambdas = j.value("lambdas", DefaultSweepLambdas());
  if (lambdas.empty()) throw ApiError(400, "invalid_request", "lambdas must be non-empty");
  std::lock_guard lock(s->mu);
  const StyleVector& w = s->Slot(j.at("slot").get<std::string>());
  const SweepResult sweep = Sweep(gen_, w, dir, lambdas, model.model, s->scenario);
  json entries = json::array();
  for (const auto& e : sweep.entries) {
    entries.push_back({{"lambda", e.lambda},
                       {"image", EncodePngBase64(e.image)},
                       {"score", ScoreImage(model, e.image)},
                       {"clamped", e.clamped},
                       {"style", StyleJson(e.w)}});
  }
  return json{{"direction_id", direction_id}, {"slot", j.at("slot")}, {"entries", entries}}.dump();
}

std::string ExplorerService::Attribution(const std::string& body) {
  const json j = ParseBody(body);
  const std::string method = j.value("method", std::string());
  if (method != "saliency" && method != "smoothgrad" && method != "integrated_gradients") {
    throw ApiError(400, "unknown_method", "method must be saliency, smoothgrad or integrated_gradients");
  }
  const ModelEntry& model = FindModel(j.at("model_id").get<std::string>());
  if (model.model.architecture().head != HeadKind::kBinary) {
    throw ApiError(422, "unsupported_model", "attribution needs a binary classifier");
  }
  ImageBuffer image;
  if (j.contains("image")) {
    image = DecodeUpload(j, gen_.image_size());
  } else if (j.contains("slot")) {
    auto s = FindSession(j.at("session_id").get<std::string>());
    std::lock_guard lock(s->mu);
    image = Quantize8(gen_.SynthesizeStyle(s->Slot(j.at("slot").get<std::string>()), s->scenario));
  } else {
    throw ApiError(400, "invalid_request", "attribution needs 'image' or 'session_id' + 'slot'");
  }
  const json params = j.value("params", json::object());
  AttributionMap attr;
  json extra = json::object();
  if (method == "saliency") {
    attr = Saliency(model.model, image);
  } else if (method == "smoothgrad") {
    attr = SmoothGrad(model.model, image, params.value("n", 25), params.value("sigma", 0.1),
                      params.value("seed", std::uint64_t{0}));
  } else {
    const ImageBuffer baseline(image.height, image.width, params.value("baseline", 0.0));
    attr = IntegratedGradients(model.model, image, baseline, params.value("steps", 128));
    extra["baseline_score"] = Score(model.model, baseline);
  }
  return json{{"method", attr.method},
              {"parameters", attr.parameters},
              {"score", Score(model.model, image)},
              {"sum", AttributionSum(attr)},
              {"heatmap", EncodePngBase64(ToHeatmap(attr))},
              {"raw", RawArray(attr)},
              {"extra", extra}}
      .dump();
}

std::string ExplorerService::Snapshot(const std::string& id) {
  auto s = FindSession(id);
  json j;
  {
    std::lock_guard lock(s->mu);
    json slots = json::array();
    for (const auto& name : s->slot_order) slots.push_back({{"name", name}, {"style", StyleJson(s->slots.at(name))}});
    json history = json::array();
    for (const auto& [a, score] : s->history) history.push_back({{"assignment", a}, {"score", score}});
    j = {{"format", "styleprobe-session"},
         {"version", 1},
         {"id", s->id},
         {"scenario", s->scenario},
         {"model_id", s->model_id},
         {"slots", slots},
         {"assignment", s->AssignmentJson()},
         {"history", history},
         {"counters", {{"slot", s->slot_counter}, {"generate", s->generate_counter}, {"invert", s->invert_counter}}}};
  }
  const std::string text = j.dump();
  if (!options_.snapshot_dir.empty()) {
    std::filesystem::create_directories(options_.snapshot_dir);
    std::ofstream out(std::filesystem::path(options_.snapshot_dir) / (id + ".json"));
    if (!out) throw std::runtime_error("cannot write session snapshot for " + id);
    out << text << "\n";
  }
  return text;
}

std::string ExplorerService::Restore(const std::string& body) {
  json j = ParseBody(body);
  if (j.contains("snapshot")) j = j.at("snapshot");
  if (j.value("format", "") != "styleprobe-session" || j.value("version", 0) != 1) {
    throw ApiError(400, "invalid_snapshot", "not a version 1 session snapshot");
  }
  auto s = std::make_shared<Session>();
  s->id = j.at("id").get<std::string>();
  s->scenario = j.at("scenario").get<std::string>();
  s->model_id = j.at("model_id").get<std::string>();
  if (!config().HasScenario(s->scenario)) throw ApiError(404, "unknown_scenario", "no scenario '" + s->scenario + "'");
  FindModel(s->model_id);
  for (const auto& slot : j.at("slots")) {
    s->AddSlot(slot.at("name").get<std::string>(), StyleFromJson(slot.at("style"), gen_.style_dim()));
  }
  for (const auto& c : j.at("assignment")) s->assignment.push_back(GroupChoice::FromJson(c));
  s->Expand(s->assignment, gen_.geometry().grouping);
  for (const auto& h : j.at("history")) s->history.emplace_back(h.at("assignment"), h.at("score").get<double>());
  const json& counters = j.at("counters");
  s->slot_counter = counters.at("slot").get<long>();
  s->generate_counter = counters.at("generate").get<long>();
  s->invert_counter = counters.at("invert").get<long>();
  {
    std::lock_guard lock(registry_mu_);
    if (sessions_.count(s->id)) throw ApiError(409, "session_exists", "session '" + s->id + "' already exists");
    sessions_[s->id] = s;
  }
  return GetSession(s->id);
}

HttpFrontend::HttpFrontend(ExplorerService& service, int http_threads)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  server_->new_task_queue = [http_threads] { return new httplib::ThreadPool(static_cast<size_t>(http_threads)); };
  server_->set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    const ApiResponse r = service_.Handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server_->Get(".*", forward);
  server_->Post(".*", forward);
  server_->Delete(".*", forward);
  server_->Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
}

HttpFrontend::~HttpFrontend() { Stop(); }

int HttpFrontend::Bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

void HttpFrontend::Run() { server_->listen_after_bind(); }

void HttpFrontend::Stop() { server_->stop(); }

}  // namespace styleprobe
