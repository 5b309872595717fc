// Copyright 2026 The qbath Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qbath: command-line driver for simulation runs, batches and the inference pipeline.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qbath/config.hpp"
#include "qbath/io.hpp"
#include "qbath/ml.hpp"
#include "qbath/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kIntegration = 2, kIo = 3 };

int cmd_presets() {
  for (const qbath::PresetInfo& p : qbath::list_presets()) {
    std::printf("%-22s %s\n", p.name.c_str(), p.citation.c_str());
    if (!p.note.empty()) std::printf("%-22s   note: %s\n", "", p.note.c_str());
  }
  return kOk;
}

qbath::RunConfig resolve(const std::string& source, const std::optional<std::string>& grid,
                         const std::optional<std::uint64_t>& seed) {
  qbath::RunConfig cfg = qbath::load_run_config(source);
  if (grid) {
    cfg.grid = qbath::named_grid(*grid);
    cfg.grid_name = *grid;
  }
  if (seed) cfg.seed = *seed;
  return cfg;
}

int cmd_run(const std::string& source, const std::string& out, const std::optional<std::string>& grid,
            const std::optional<std::uint64_t>& seed) {
  const qbath::RunConfig cfg = resolve(source, grid, seed);
  std::fprintf(stderr, "running '%s' on %d qubits, grid %s (%d points to t=%g)\n", cfg.name.c_str(), cfg.n_qubits,
               cfg.grid_name.c_str(), cfg.grid.n_points, cfg.grid.t_end);
  const qbath::RunRecord rec = qbath::run_single(cfg);
  const std::vector<std::string> files = qbath::emit_outputs(rec, out);
  std::printf("run %s finished in %.1f s (%d RK4 substeps per grid step)\n", cfg.name.c_str(), rec.seconds,
              rec.substeps);
  std::printf("  final fidelity to thermal state  %.6f\n", rec.fidelity.back());
  std::printf("  final system entropy              %.6f (thermal %.6f)\n", rec.entropy.back(), rec.thermal_entropy);
  if (!rec.trace_distance.empty()) {
    std::printf("  backflow total                    %.6g (rate %.6g)\n", rec.backflow.total, rec.backflow.rate);
  }
  std::printf("  dominant frequency of sx          %.6f\n", rec.dominant.value);
  std::printf("  peak sharpness |J(f)|             %.4f\n", rec.sharpness);
  std::printf("  DEPS                              %.6g%s\n", rec.deps, rec.deps_degenerate ? " (degenerate)" : "");
  std::printf("  K_max                             %.6g%s\n", rec.k_max, rec.k_flagged ? " (EP flagged)" : "");
  std::printf("  wrote %zu files to %s\n", files.size(), out.c_str());
  return kOk;
}

int cmd_batch(const std::string& source, int runs, int workers, const std::string& out,
              const std::optional<std::string>& grid, const std::optional<std::uint64_t>& seed) {
  const qbath::RunConfig cfg = resolve(source, grid, seed);
  qbath::BatchOptions opts;
  opts.n_runs = runs;
  opts.workers = workers;
  opts.progress = [&](long id, bool ok, double secs) {
    std::fprintf(stderr, "run %ld/%d %s (%.1f s)\n", id + 1, runs, ok ? "ok" : "FAILED", secs);
  };
  const qbath::BatchResult result = qbath::run_batch(cfg, opts);
  const std::vector<std::string> files = qbath::emit_batch(result, cfg, out);
  std::printf("batch %s: %zu runs, %zu failed, dataset rows %zu; wrote %zu files to %s\n", cfg.name.c_str(),
              result.rows.size(), result.failures(), result.rows.size() - result.failures(), files.size(),
              out.c_str());
  return kOk;
}

int cmd_train(const std::string& features, const std::string& targets, int pca, std::uint64_t seed,
              const std::string& model_path, double train_fraction) {
  qbath::ml::Dataset ds = qbath::load_dataset(features, targets);

  std::vector<Eigen::Index> keep;
  for (Eigen::Index r = 0; r < ds.rows(); ++r) {
    if (ds.targets.row(r).allFinite()) keep.push_back(r);
  }
  if (static_cast<Eigen::Index>(keep.size()) != ds.rows()) {
    std::fprintf(stderr, "excluding %td rows with flagged (non-finite) targets\n",
                 static_cast<std::ptrdiff_t>(ds.rows() - static_cast<Eigen::Index>(keep.size())));
    ds = ds.subset(keep);
  }
  const auto [train, test] = qbath::ml::train_test_split(ds, train_fraction, seed);
  const qbath::ml::Pipeline pipe = qbath::ml::fit_pipeline(train, pca, qbath::ml::GbtHyper{}, seed);
  if (pipe.pca.truncated) std::fprintf(stderr, "PCA truncated to %td components\n", pipe.pca.n_components());

  std::printf("train rows %td, test rows %td, PCA components %td\n", train.rows(), test.rows(),
              pipe.pca.n_components());
  std::printf("%-16s %14s %10s\n", "target", "test MSE", "test R2");
  if (test.rows() > 0) {
    const qbath::RealMatrix pred = pipe.predict(test.features);
    const std::vector<qbath::ml::TargetScore> scores = qbath::ml::evaluate(pred, test.targets);
    for (std::size_t i = 0; i < scores.size(); ++i) {
      std::printf("%-16s %14.6g %10s\n", pipe.target_names[i].c_str(), scores[i].mse,
                  scores[i].r2_defined ? std::to_string(scores[i].r2).c_str() : "undefined");
    }
  }
  std::ofstream out(model_path);
  if (!out) throw qbath::IoError("cannot write model '" + model_path + "'");
  qbath::ml::save_pipeline(pipe, out);
  if (!out) throw qbath::IoError("write failed for model '" + model_path + "'");
  std::printf("model written to %s\n", model_path.c_str());
  return kOk;
}

int cmd_predict(const std::string& model_path, const std::string& features) {
  std::ifstream in(model_path);
  if (!in) throw qbath::IoError("cannot open model '" + model_path + "'");
  const qbath::ml::Pipeline pipe = qbath::ml::load_pipeline(in);
  std::vector<long> ids;
  const qbath::RealMatrix x = qbath::load_features(features, &ids);
  const qbath::RealMatrix pred = pipe.predict(x);
  std::cout << "run_id";
  for (const std::string& n : pipe.target_names) std::cout << ',' << n;
  std::cout << '\n';
  for (Eigen::Index r = 0; r < pred.rows(); ++r) {
    std::cout << ids[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < pred.cols(); ++c) std::cout << ',' << qbath::format_number(pred(r, c));
    std::cout << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qbath: open-system simulation of a qubit coupled to a structured qubit bath"};
  app.require_subcommand(1);

  std::string source;
  std::string out = "qbath_out";
  std::optional<std::string> grid;
  std::optional<std::uint64_t> seed;
  int runs = 1;
  int workers = 1;
  std::string features;
  std::string targets;
  std::string model = "model.txt";
  int pca = 4;
  std::uint64_t train_seed = 0;
  double train_fraction = 0.8;

  CLI::App* run = app.add_subcommand("run", "simulate one config file or preset and write its outputs");
  run->add_option("config", source, "config file or preset name")->required();
  run->add_option("--out", out, "output directory");
  run->add_option("--grid", grid, "override the time grid")->check(CLI::IsMember({"short", "long"}));
  run->add_option("--seed", seed, "override the seed");

  CLI::App* batch = app.add_subcommand("batch", "randomized batch producing features.csv and targets.csv");
  batch->add_option("config", source, "config file or preset name with 'randomize' ranges")->required();
  batch->add_option("--runs", runs, "number of runs")->required()->check(CLI::PositiveNumber);
  batch->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  batch->add_option("--out", out, "output directory");
  batch->add_option("--grid", grid, "override the time grid")->check(CLI::IsMember({"short", "long"}));
  batch->add_option("--seed", seed, "override the seed");

  CLI::App* train = app.add_subcommand("train", "fit PCA + gradient-boosted trees and report held-out scores");
  train->add_option("features", features, "features CSV")->required();
  train->add_option("targets", targets, "targets CSV")->required();
  train->add_option("--pca", pca, "number of principal components")->check(CLI::PositiveNumber);
  train->add_option("--seed", train_seed, "split and subsampling seed");
  train->add_option("--train-fraction", train_fraction, "fraction of rows used for training")
      ->check(CLI::Range(0.0, 1.0));
  train->add_option("--out", model, "model file");

  CLI::App* predict = app.add_subcommand("predict", "apply a saved model to a features CSV");
  predict->add_option("model", model, "model file")->required();
  predict->add_option("features", features, "features CSV")->required();

  app.add_subcommand("presets", "list compiled-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*run) return cmd_run(source, out, grid, seed);
    if (*batch) return cmd_batch(source, runs, workers, out, grid, seed);
    if (*train) return cmd_train(features, targets, pca, train_seed, model, train_fraction);
    if (*predict) return cmd_predict(model, features);
    return cmd_presets();
  } catch (const qbath::IntegrationError& e) {
    std::fprintf(stderr, "integration failure: %s\n", e.what());
    return kIntegration;
  } catch (const qbath::IoError& e) {
    std::fprintf(stderr, "I/O failure: %s\n", e.what());
    return kIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  }
}
