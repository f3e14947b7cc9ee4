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

#ifndef ANTIDOTE_EXPERIMENT_H_
#define ANTIDOTE_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "antidote/antidote.h"
#include "antidote/antidote_matrix.h"
#include "antidote/config.h"
#include "antidote/factorization.h"
#include "antidote/objectives.h"
#include "antidote/ratings.h"

namespace antidote {

enum class Algorithm {
  kNone,
  kGdRandom,
  kGdFixed,
  kHeuristic1,
  kHeuristic2,
  kBaselineMin,
  kBaselineMax,
  kRandom,
};

const char* AlgorithmName(Algorithm algorithm);
Algorithm ParseAlgorithm(const std::string& name);

// Fully resolved settings of one experiment. Every field maps to one
// "section.key" entry; ToKeyValues() lists all of them, defaults included.
struct ExperimentConfig {
  // [dataset]
  std::string ratings_path;
  std::string format = "movielens";  // movielens | csv
  std::string separator = "::";
  std::string movies_path;  // genre groups, first listed genre
  std::string groups_path;  // CSV groups, alternative to movies_path
  GroupAxis group_axis = GroupAxis::kItems;
  RatingBounds bounds;
  int top_items = 0;               // 0 keeps all items
  std::string user_filter = "none";  // none | most_active | random_subset
  int users = 0;
  uint64_t filter_seed = 0;

  // [holdout]; fraction 0 disables the split.
  double holdout_fraction = 0.0;
  uint64_t holdout_seed = 0;

  // [factorization]
  int rank = 8;
  double reg = 1.0;
  AlsOptions als;

  // [objective]
  ObjectiveKind objective = ObjectiveKind::kPolarization;
  Direction direction = Direction::kMinimize;

  // [algorithm]
  Algorithm algorithm = Algorithm::kNone;
  // More than one entry requests a budget sweep.
  std::vector<std::string> budgets{"1%"};
  GdOptions gd;
  // Heuristic2 reads the system's factors from here instead of factorizing.
  std::string factors_path;

  // [evaluation]
  bool evaluate = true;
  std::vector<int> topk{1, 5, 10, 20, 30};

  // [validation]
  std::vector<int> grid_ranks{4, 8};
  std::vector<double> grid_regs{0.1, 1.0, 10.0};
  int grid_splits = 10;
  double grid_fraction = 0.2;
  uint64_t grid_seed = 0;

  // [output]
  std::string out_dir = "out";
  bool write_factors = false;

  // Unknown keys and malformed values throw kConfig.
  static ExperimentConfig FromKeyValues(const KeyValues& values);
  // Applies `values` on top of `base`.
  static ExperimentConfig FromKeyValues(const KeyValues& values,
                                        const ExperimentConfig& base);
  KeyValues ToKeyValues() const;
  // Every key accepted by FromKeyValues, in canonical order.
  static std::vector<std::string> Keys();

  // Checks value ranges and the algorithm/objective pairing.
  void Validate() const;
  ObjectiveSpec Objective(std::optional<GroupAssignment> groups) const;
};

// Reads a config file, or the configuration echoed by a report written with
// WriteReport, so that any experiment can be re-run from its own report.
ExperimentConfig LoadExperimentConfig(const std::string& path);

// First line of every report written by WriteReport.
inline constexpr char kReportHeader[] = "# antidote experiment report";

// The key-value pairs of a report's [config] section.
KeyValues ReportConfigEcho(std::istream& in);

// One configuration per budget entry, each writing under
// `<out_dir>/budget_<label>`. A single budget is returned unchanged.
std::vector<ExperimentConfig> ExpandBudgetSweep(const ExperimentConfig& config);

// Output of the load/filter/split stages.
struct PreparedData {
  RatingDataset filtered;
  RatingDataset train;
  std::optional<RatingDataset> test;
  std::optional<GroupAssignment> groups;

  // Held-out ratings when a split was made, else the training ratings.
  const RatingDataset& evaluation() const { return test ? *test : train; }
};

PreparedData PrepareData(const ExperimentConfig& config);

struct ExperimentReport {
  std::string algorithm;
  std::string budget;
  int antidote_users = 0;
  std::string objective;
  std::string direction;
  bool held_out = false;

  double objective_before = 0.0;
  double objective_after = 0.0;
  double rmse_train_before = 0.0;
  double rmse_train_after = 0.0;
  std::optional<double> rmse_test_before;
  std::optional<double> rmse_test_after;

  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  std::vector<double> per_user_rmse_before;
  std::vector<double> per_user_rmse_after;
  std::vector<std::string> group_names;
  std::vector<double> per_group_rmse_before;
  std::vector<double> per_group_rmse_after;
  std::vector<double> per_item_variance_before;
  std::vector<double> per_item_variance_after;
  std::vector<std::pair<int, double>> topk_jaccard;

  std::vector<double> trace;
  std::vector<double> restart_objectives;
  int best_restart = 0;
  bool line_search_exhausted = false;
  std::optional<double> heuristic_sign_agreement;
  std::vector<std::string> notes;

  AntidoteMatrix antidote;
  KeyValues config_echo;
  // The system's factors before the antidote, kept when output.factors is set.
  std::optional<FactorModel> factors;
};

// load -> filter -> split -> factorize -> metrics -> antidote -> joint
// factorization -> metrics. With `external` the given antidote is evaluated
// instead of generating one. Errors carry the failing stage's name.
ExperimentReport RunExperiment(const ExperimentConfig& config,
                               const AntidoteMatrix* external = nullptr,
                               const std::string& external_label = "");

// Generation only: the antidote and the data it was built for. Heuristic2 with
// a factors file never calls the factorization.
struct GeneratedAntidote {
  PreparedData data;
  AntidoteMatrix antidote;
};
GeneratedAntidote GenerateOnly(const ExperimentConfig& config);

// Structured text: summary values at 6 significant digits, then tables, the
// configuration echo, and a machine section with full-precision values.
void WriteReport(const ExperimentReport& report, std::ostream& out);

// report.txt, antidote.csv and the per_user_rmse, per_item_variance,
// per_group_rmse and topk_jaccard CSVs under `dir` (created if missing), plus
// factors.txt when the report carries factors.
void WriteReportFiles(const ExperimentReport& report, const std::string& dir);

}  // namespace antidote

#endif  // ANTIDOTE_EXPERIMENT_H_
