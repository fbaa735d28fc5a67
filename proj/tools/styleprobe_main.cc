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

// styleprobe: command-line front end for the workbench.
//
//   styleprobe serve --config workbench.json --port 8080
//   styleprobe prepare-dataset --scenario toy-faces --out data/faces
//   styleprobe train-classifier --data data/faces --out models/faces.bin
//   styleprobe fit-direction --model models/faces.bin --scenario toy-faces --out dirs/faces.json
//   styleprobe invert --scenario toy-faces --image face.png
//   styleprobe config

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "styleprobe/classifier.h"
#include "styleprobe/config.h"
#include "styleprobe/dataset.h"
#include "styleprobe/directions.h"
#include "styleprobe/image_io.h"
#include "styleprobe/inversion.h"
#include "styleprobe/service.h"

namespace {

using namespace styleprobe;

styleprobe::HttpFrontend* g_frontend = nullptr;

void HandleSignal(int) {
  if (g_frontend != nullptr) g_frontend->Stop();
}

WorkbenchConfig ResolveConfig(const std::string& path) {
  return path.empty() ? DefaultConfig() : LoadConfig(path);
}

int Serve(const std::string& config_path, std::optional<int> port_flag, const std::string& host,
          const std::string& snapshot_dir, const std::vector<std::string>& model_specs) {
  WorkbenchConfig cfg = ResolveConfig(config_path);
  int port = cfg.interface.port;
  if (const char* env = std::getenv("STYLEPROBE_PORT"); env != nullptr && *env != '\0') port = std::stoi(env);
  if (port_flag) port = *port_flag;

  ExplorerService service(cfg, ServiceOptions{snapshot_dir});
  service.LoadArtifacts();
  // --model id=scenario:path
  for (const auto& spec : model_specs) {
    const auto eq = spec.find('=');
    const auto colon = spec.find(':', eq == std::string::npos ? 0 : eq);
    if (eq == std::string::npos || colon == std::string::npos) {
      throw std::invalid_argument("--model expects id=scenario:path, got '" + spec + "'");
    }
    service.AddModel(spec.substr(0, eq), spec.substr(eq + 1, colon - eq - 1),
                     ClassifierModel::Load(spec.substr(colon + 1)));
  }

  HttpFrontend frontend(service);
  const int bound = frontend.Bind(host, port);
  if (bound < 0) {
    std::cerr << "cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  g_frontend = &frontend;
  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  std::cout << "listening on http://" << host << ":" << bound << std::endl;
  frontend.Run();
  g_frontend = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"styleprobe: generative probing workbench for image classifiers"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "Workbench config (JSON); built-in defaults when omitted");

  auto* serve = app.add_subcommand("serve", "Run the explorer HTTP service");
  std::optional<int> port;
  std::string host = "127.0.0.1";
  std::string snapshot_dir;
  std::vector<std::string> model_specs;
  serve->add_option("--config", config_path, "Workbench config (JSON)");
  serve->add_option("--port", port, "Port (overrides STYLEPROBE_PORT and the config)");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--snapshot-dir", snapshot_dir, "Directory for session snapshot files");
  serve->add_option("--model", model_specs, "Extra model as id=scenario:path (repeatable)");

  auto* prepare = app.add_subcommand("prepare-dataset", "Render a labeled dataset to PNG + manifest.jsonl");
  std::string scenario = "toy-faces";
  std::string out;
  int n_train = 4096;
  int n_val = 1024;
  double rho = 0.0;
  std::uint64_t seed = 1;
  std::string confounder;
  int polarity = 1;
  prepare->add_option("--config", config_path, "Workbench config (JSON)");
  prepare->add_option("--scenario", scenario, "Scenario id")->capture_default_str();
  prepare->add_option("--out", out, "Output directory")->required();
  prepare->add_option("--n-train", n_train, "Training examples")->capture_default_str();
  prepare->add_option("--n-val", n_val, "Validation examples")->capture_default_str();
  prepare->add_option("--rho", rho, "Label/confounder correlation in [-1, 1]")->capture_default_str();
  prepare->add_option("--confounder", confounder, "Override the scenario's confounder attribute");
  prepare->add_option("--polarity", polarity, "Confounder polarity (+1 or -1)")->capture_default_str();
  prepare->add_option("--seed", seed, "Sampling seed")->capture_default_str();

  auto* train = app.add_subcommand("train-classifier", "Train a classifier on an exported dataset");
  std::string data_dir;
  std::string head = "binary";
  std::string activation = "softplus";
  TrainConfig tc;
  train->add_option("--config", config_path, "Workbench config (JSON)");
  train->add_option("--data", data_dir, "Dataset directory from prepare-dataset")->required();
  train->add_option("--scenario", scenario, "Scenario id (defaults to the manifest's)");
  train->add_option("--out", out, "Model file")->required();
  train->add_option("--epochs", tc.epochs, "Epochs")->capture_default_str();
  train->add_option("--lr", tc.lr, "Adam learning rate")->capture_default_str();
  train->add_option("--batch", tc.batch_size, "Mini-batch size")->capture_default_str();
  train->add_option("--pool", tc.pool, "Input pooling (1 or 2)")->capture_default_str();
  train->add_option("--head", head, "binary or brackets")->capture_default_str();
  train->add_option("--activation", activation, "softplus or relu")->capture_default_str();
  train->add_option("--seed", seed, "Initialisation/shuffle seed")->capture_default_str();

  auto* fit = app.add_subcommand("fit-direction", "Fit a latent edit direction for a classifier");
  std::string model_path;
  bool full_scale = false;
  std::optional<int> fit_train, fit_val;
  std::string attribute;
  fit->add_option("--config", config_path, "Workbench config (JSON)");
  fit->add_option("--model", model_path, "Classifier model file")->required();
  fit->add_option("--scenario", scenario, "Scenario id")->capture_default_str();
  fit->add_option("--out", out, "Direction file (JSON)")->required();
  fit->add_option("--n-train", fit_train, "Latent training samples (default: config latent_train)");
  fit->add_option("--n-val", fit_val, "Latent validation samples (default: config latent_val)");
  fit->add_flag("--full-scale", full_scale, "Use 20000/5000 latent samples");
  fit->add_option("--attribute", attribute, "Attribute name recorded with the direction");
  fit->add_option("--seed", seed, "Sampling and fit seed")->capture_default_str();

  auto* invert = app.add_subcommand("invert", "Reconstruct a PNG into a style vector");
  std::string image_path;
  InversionConfig ic;
  invert->add_option("--config", config_path, "Workbench config (JSON)");
  invert->add_option("--scenario", scenario, "Scenario id")->capture_default_str();
  invert->add_option("--image", image_path, "Target PNG")->required();
  invert->add_option("--restarts", ic.restarts, "Random restarts")->capture_default_str();
  invert->add_option("--steps", ic.steps, "Adam steps per restart")->capture_default_str();
  invert->add_option("--lr", ic.lr, "Adam learning rate")->capture_default_str();
  invert->add_option("--seed", ic.seed, "Restart seed")->capture_default_str();
  invert->add_option("--out", out, "Write the reconstruction PNG here");

  auto* show = app.add_subcommand("config", "Print the effective workbench config");
  show->add_option("--config", config_path, "Workbench config (JSON)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) return Serve(config_path, port, host, snapshot_dir, model_specs);

    const WorkbenchConfig cfg = ResolveConfig(config_path);

    if (*prepare) {
      DatasetOptions opts;
      if (!confounder.empty()) opts.confounder = confounder;
      opts.confounder_polarity = polarity;
      const LabeledDataset ds = MakeDataset(cfg, scenario, n_train, n_val, rho, Rng(seed), opts);
      ExportDataset(ds, cfg.Scenario(scenario), out);
      std::cout << "wrote " << ds.train.size() << " train and " << ds.val.size() << " val examples to " << out
                << "\n";
      return 0;
    }

    if (*train) {
      if (scenario.empty() || train->count("--scenario") == 0) {
        std::ifstream manifest(data_dir + "/manifest.jsonl");
        std::string line;
        if (!manifest || !std::getline(manifest, line)) throw std::runtime_error("cannot read manifest in " + data_dir);
        scenario = nlohmann::json::parse(line).at("scenario").get<std::string>();
      }
      if (head == "binary") {
        tc.head = HeadKind::kBinary;
      } else if (head == "brackets") {
        tc.head = HeadKind::kBrackets;
      } else {
        throw std::invalid_argument("--head must be binary or brackets");
      }
      if (activation == "softplus") {
        tc.activation = Activation::kSoftplus;
      } else if (activation == "relu") {
        tc.activation = Activation::kRelu;
      } else {
        throw std::invalid_argument("--activation must be softplus or relu");
      }
      const LabeledDataset ds = ImportDataset(data_dir, cfg.Scenario(scenario));
      const TrainResult result = TrainClassifier(ds, tc, Rng(seed));
      if (result.single_class) std::cerr << "warning: training labels contain a single class\n";
      for (const auto& e : result.epochs) {
        std::cout << "epoch " << e.epoch << " train_loss " << e.train_loss << " train_acc " << e.train_accuracy
                  << " val_loss " << e.val_loss << " val_acc " << e.val_accuracy << "\n";
      }
      result.model.Save(out);
      return 0;
    }

    if (*fit) {
      const Generator gen(cfg);
      const ClassifierModel model = ClassifierModel::Load(model_path);
      int nt = full_scale ? kDefaultLatentTrain : cfg.interface.latent_train;
      int nv = full_scale ? kDefaultLatentVal : cfg.interface.latent_val;
      if (fit_train) nt = *fit_train;
      if (fit_val) nv = *fit_val;
      const LatentDataset data = SampleLatentDataset(gen, model, scenario, nt, nv, Rng(seed));
      DirectionFitConfig fc;
      fc.seed = seed;
      const DirectionModel dir = FitDirection(data, fc, attribute);
      dir.Save(out);
      std::cout << "direction val_acc " << dir.val_accuracy << " epochs " << dir.epochs << " -> " << out << "\n";
      return 0;
    }

    if (*invert) {
      const Generator gen(cfg);
      const ImageBuffer target = ReadPng(image_path);
      const InversionResult r = Invert(gen, target, scenario, ic);
      nlohmann::json j = {{"final_loss", r.final_loss}, {"style", r.w.values}, {"restart_losses", r.restart_losses}};
      std::cout << j.dump(2) << "\n";
      if (!out.empty()) WritePng(out, r.reconstructed);
      return 0;
    }

    if (*show) {
      std::cout << ConfigToJson(cfg) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
