// Copyright 2026 The Antidote Authors.
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


// Command-line front end:
//
//   antidote validate --config exp.conf
//   antidote antidote --config exp.conf --algorithm.budget "1,0.5%,1%,2%,5%"
//   antidote evaluate --config exp.conf third_party.csv
//   antidote prepare  --config exp.conf --out prepared
//
// Every config key is also a flag named after its path, e.g.
// --factorization.rank 8; flags override the config file.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "antidote/antidote_matrix.h"
#include "antidote/config.h"
#include "antidote/error.h"
#include "antidote/experiment.h"
#include "antidote/factorization.h"
#include "antidote/ratings.h"

namespace antidote {
namespace {

// Config file plus per-key overrides shared by every subcommand.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void AddConfigFlags(CLI::App* command, ConfigFlags* flags) {
  command->add_option("--config", flags->config_path,
                      "Config file, or a report.txt whose configuration to reuse");
  for (const std::string& key : ExperimentConfig::Keys()) {
    command->add_option_function<std::string>(
        "--" + key, [flags, key](const std::string& v) { flags->overrides[key] = v; },
        "Overrides " + key);
  }
  command->add_option_function<std::string>(
      "--out", [flags](const std::string& v) { flags->overrides["output.dir"] = v; },
      "Output directory (output.dir)");
}

ExperimentConfig ResolveConfig(const ConfigFlags& flags) {
  ExperimentConfig base;
  if (!flags.config_path.empty()) base = LoadExperimentConfig(flags.config_path);
  KeyValues overrides(flags.overrides.begin(), flags.overrides.end());
  return ExperimentConfig::FromKeyValues(overrides, base);
}

std::filesystem::path OutputDir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
  return dir;
}

// Refuses to write over any of the experiment's input files.
std::ofstream OpenOutput(const std::filesystem::path& path, const ExperimentConfig& config) {
  for (const std::string& input : {config.ratings_path, config.movies_path,
                                   config.groups_path, config.factors_path}) {
    std::error_code ec;
    if (!input.empty() && std::filesystem::equivalent(path, input, ec)) {
      throw ConfigError("refusing to overwrite input file '" + input + "'");
    }
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void PrintSummary(const ExperimentReport& report, const std::string& dir) {
  std::printf("%s budget %s (%d users): %s %s -> %s, written to %s\n",
              report.algorithm.c_str(), report.budget.c_str(), report.antidote_users,
              report.objective.c_str(), FormatDouble(report.objective_before).c_str(),
              FormatDouble(report.objective_after).c_str(), dir.c_str());
}

int RunValidate(const ExperimentConfig& config) {
  config.Validate();
  PreparedData data = PrepareData(config);
  std::vector<ValidationCell> cells =
      ValidationRmseGrid(data.filtered, config.grid_ranks, config.grid_regs,
                         config.grid_splits, config.grid_fraction, config.grid_seed,
                         config.als);
  std::filesystem::path dir = OutputDir(config.out_dir);
  std::ofstream out = OpenOutput(dir / "validation.csv", config);
  out << "rank,reg,mean_rmse\n";
  for (const ValidationCell& cell : cells) {
    out << cell.rank << ',' << FormatDouble(cell.reg) << ',' << FormatDouble(cell.mean_rmse)
        << '\n';
    std::printf("rank %d reg %s: mean validation RMSE %.4f\n", cell.rank,
                FormatDouble(cell.reg).c_str(), cell.mean_rmse);
  }
  if (!out) throw IoError("failed writing validation.csv");
  return 0;
}

// One budget: the full pipeline, or generation only when evaluation is off.
void RunOneBudget(const ExperimentConfig& config) {
  if (config.evaluate) {
    ExperimentReport report = RunExperiment(config);
    WriteReportFiles(report, config.out_dir);
    PrintSummary(report, config.out_dir);
    return;
  }
  GeneratedAntidote generated = GenerateOnly(config);
  std::filesystem::path dir = OutputDir(config.out_dir);
  std::ofstream out = OpenOutput(dir / "antidote.csv", config);
  WriteAntidoteCsv(generated.antidote, generated.data.train, out);
  if (!out) throw IoError("failed writing antidote.csv");
  std::printf("%s: %d antidote users written to %s\n", AlgorithmName(config.algorithm),
              generated.antidote.num_users(), (dir / "antidote.csv").string().c_str());
}

int RunAntidote(const ExperimentConfig& config, bool parallel) {
  config.Validate();
  std::vector<ExperimentConfig> runs = ExpandBudgetSweep(config);
  const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  if (!parallel || runs.size() < 2 || hardware < 2) {
    for (const ExperimentConfig& run : runs) RunOneBudget(run);
    return 0;
  }
  // Budgets are independent experiments; run them in waves of `hardware`.
  std::vector<std::exception_ptr> failures(runs.size());
  for (size_t first = 0; first < runs.size(); first += hardware) {
    std::vector<std::thread> wave;
    for (size_t k = first; k < std::min(runs.size(), first + hardware); ++k) {
      wave.emplace_back([&, k] {
        try {
          RunOneBudget(runs[k]);
        } catch (...) {
          failures[k] = std::current_exception();
        }
      });
    }
    for (std::thread& t : wave) t.join();
  }
  for (const std::exception_ptr& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return 0;
}

int RunEvaluate(const ExperimentConfig& config, const std::string& antidote_path) {
  config.Validate();
  PreparedData data = PrepareData(config);
  std::ifstream in(antidote_path);
  if (!in) throw IoError("cannot open '" + antidote_path + "'");
  AntidoteMatrix antidote = [&] {
    try {
      return LoadAntidoteCsv(in, data.train);
    } catch (const Error& e) {
      throw e.WithContext(antidote_path);
    }
  }();
  std::string label = std::filesystem::path(antidote_path).filename().string();
  ExperimentReport report = RunExperiment(config, &antidote, label);
  WriteReportFiles(report, config.out_dir);
  PrintSummary(report, config.out_dir);
  return 0;
}

int RunPrepare(const ExperimentConfig& config) {
  config.Validate();
  PreparedData data = PrepareData(config);
  std::filesystem::path dir = OutputDir(config.out_dir);
  auto write = [&](const std::string& name, const RatingDataset& ds) {
    std::ofstream out = OpenOutput(dir / name, config);
    WriteRatingsCsv(ds, out);
    if (!out) throw IoError("failed writing " + name);
    std::printf("%s: %d users, %d items, %ld ratings\n", name.c_str(), ds.num_users(),
                ds.num_items(), static_cast<long>(ds.num_entries()));
  };
  write("filtered.csv", data.filtered);
  write("train.csv", data.train);
  if (data.test) write("test.csv", *data.test);
  if (data.groups) {
    std::ofstream out = OpenOutput(dir / "groups.csv", config);
    WriteGroupsCsv(*data.groups, data.filtered, out);
    if (!out) throw IoError("failed writing groups.csv");
  }
  return 0;
}

}  // namespace
}  // namespace antidote

int main(int argc, char** argv) {
  using namespace antidote;
  CLI::App app{"Generate and evaluate antidote data for matrix-factorization recommenders"};
  app.require_subcommand(1);

  ConfigFlags validate_flags;
  CLI::App* validate = app.add_subcommand(
      "validate", "Mean held-out RMSE over the validation grid; writes validation.csv");
  AddConfigFlags(validate, &validate_flags);

  ConfigFlags antidote_flags;
  bool parallel = false;
  CLI::App* generate = app.add_subcommand(
      "antidote", "Generate antidote data and report its effect, once per budget");
  AddConfigFlags(generate, &antidote_flags);
  generate->add_option_function<std::string>(
      "--factors",
      [&](const std::string& v) { antidote_flags.overrides["algorithm.factors"] = v; },
      "Factor file for heuristic2 (algorithm.factors)");
  generate->add_flag("--parallel", parallel, "Run the budgets of a sweep concurrently");

  ConfigFlags evaluate_flags;
  std::string antidote_path;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Report the effect of an existing antidote CSV on the configured system");
  AddConfigFlags(evaluate, &evaluate_flags);
  evaluate->add_option("antidote", antidote_path, "Antidote CSV (user_id,item_id,rating)")
      ->required();

  ConfigFlags prepare_flags;
  CLI::App* prepare = app.add_subcommand(
      "prepare", "Load, filter and split the dataset; write the resulting CSVs");
  AddConfigFlags(prepare, &prepare_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*validate) return RunValidate(ResolveConfig(validate_flags));
    if (*generate) return RunAntidote(ResolveConfig(antidote_flags), parallel);
    if (*evaluate) return RunEvaluate(ResolveConfig(evaluate_flags), antidote_path);
    if (*prepare) return RunPrepare(ResolveConfig(prepare_flags));
  } catch (const Error& e) {
    std::cerr << "antidote: " << ErrorCodeName(e.code()) << ": " << e.what() << '\n';
    return ExitStatusFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "antidote: internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
