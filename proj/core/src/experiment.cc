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

#include "antidote/experiment.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "antidote/error.h"
#include "antidote/evaluation.h"

namespace antidote {
namespace {

// ---------------------------------------------------------------------------
// Value codecs for config fields.

std::string Quote(const std::string& key) { return "'" + key + "'"; }

int ToInt(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    long x = std::stol(v, &used);
    if (used == v.size()) return static_cast<int>(x);
  } catch (const std::logic_error&) {
  }
  throw ConfigError("config key " + Quote(key) + " expects an integer, got '" + v + "'");
}

uint64_t ToSeed(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    unsigned long long x = std::stoull(v, &used);
    if (used == v.size() && v.find('-') == std::string::npos) return x;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("config key " + Quote(key) + " expects a seed, got '" + v + "'");
}

double ToDouble(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    double x = std::stod(v, &used);
    if (used == v.size() && std::isfinite(x)) return x;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("config key " + Quote(key) + " expects a number, got '" + v + "'");
}

bool ToBool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("config key " + Quote(key) + " expects true or false, got '" + v + "'");
}

std::vector<std::string> SplitList(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream in(v);
  std::string token;
  while (std::getline(in, token, ',')) {
    size_t b = token.find_first_not_of(" \t");
    size_t e = token.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(token.substr(b, e - b + 1));
  }
  return out;
}

template <typename T, typename F>
std::string JoinList(const std::vector<T>& values, F format) {
  std::string out;
  for (size_t k = 0; k < values.size(); ++k) {
    if (k > 0) out += ',';
    out += format(values[k]);
  }
  return out;
}

std::string Str(bool b) { return b ? "true" : "false"; }
std::string Str(int x) { return std::to_string(x); }
std::string Str(uint64_t x) { return std::to_string(x); }
std::string Str(double x) { return FormatDouble(x); }

struct Field {
  const char* key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

#define ANTIDOTE_FIELD(KEY, MEMBER, PARSE)                                    \
  Field {                                                                     \
    KEY, [](const ExperimentConfig& c) { return Str(c.MEMBER); },             \
        [](ExperimentConfig& c, const std::string& v) { c.MEMBER = PARSE(KEY, v); } \
  }
#define ANTIDOTE_TEXT_FIELD(KEY, MEMBER)                              \
  Field {                                                             \
    KEY, [](const ExperimentConfig& c) { return c.MEMBER; },          \
        [](ExperimentConfig& c, const std::string& v) { c.MEMBER = v; } \
  }

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      ANTIDOTE_TEXT_FIELD("dataset.ratings", ratings_path),
      ANTIDOTE_TEXT_FIELD("dataset.format", format),
      ANTIDOTE_TEXT_FIELD("dataset.separator", separator),
      ANTIDOTE_TEXT_FIELD("dataset.movies", movies_path),
      ANTIDOTE_TEXT_FIELD("dataset.groups", groups_path),
      Field{"dataset.group_axis",
            [](const ExperimentConfig& c) {
              return std::string(c.group_axis == GroupAxis::kUsers ? "users" : "items");
            },
            [](ExperimentConfig& c, const std::string& v) {
              if (v == "users") {
                c.group_axis = GroupAxis::kUsers;
              } else if (v == "items") {
                c.group_axis = GroupAxis::kItems;
              } else {
                throw ConfigError("dataset.group_axis must be users or items");
              }
            }},
      ANTIDOTE_FIELD("dataset.rating_min", bounds.min, ToDouble),
      ANTIDOTE_FIELD("dataset.rating_max", bounds.max, ToDouble),
      ANTIDOTE_FIELD("dataset.top_items", top_items, ToInt),
      ANTIDOTE_TEXT_FIELD("dataset.user_filter", user_filter),
      ANTIDOTE_FIELD("dataset.users", users, ToInt),
      ANTIDOTE_FIELD("dataset.filter_seed", filter_seed, ToSeed),

      ANTIDOTE_FIELD("holdout.fraction", holdout_fraction, ToDouble),
      ANTIDOTE_FIELD("holdout.seed", holdout_seed, ToSeed),

      ANTIDOTE_FIELD("factorization.rank", rank, ToInt),
      ANTIDOTE_FIELD("factorization.reg", reg, ToDouble),
      ANTIDOTE_FIELD("factorization.max_sweeps", als.max_sweeps, ToInt),
      ANTIDOTE_FIELD("factorization.objective_tol", als.objective_tol, ToDouble),
      ANTIDOTE_FIELD("factorization.seed", als.seed, ToSeed),
      ANTIDOTE_FIELD("factorization.init_scale", als.init_scale, ToDouble),

      Field{"objective.kind",
            [](const ExperimentConfig& c) {
              return std::string(ObjectiveKindName(c.objective));
            },
            [](ExperimentConfig& c, const std::string& v) {
              c.objective = ParseObjectiveKind(v);
            }},
      Field{"objective.direction",
            [](const ExperimentConfig& c) { return std::string(DirectionName(c.direction)); },
            [](ExperimentConfig& c, const std::string& v) {
              c.direction = ParseDirection(v);
            }},

      Field{"algorithm.name",
            [](const ExperimentConfig& c) { return std::string(AlgorithmName(c.algorithm)); },
            [](ExperimentConfig& c, const std::string& v) {
              c.algorithm = ParseAlgorithm(v);
            }},
      Field{"algorithm.budget",
            [](const ExperimentConfig& c) {
              return JoinList(c.budgets, [](const std::string& s) { return s; });
            },
            [](ExperimentConfig& c, const std::string& v) { c.budgets = SplitList(v); }},
      ANTIDOTE_FIELD("algorithm.max_iters", gd.max_iters, ToInt),
      Field{"algorithm.step_rule",
            [](const ExperimentConfig& c) {
              return std::string(c.gd.step_rule == StepRule::kFixed ? "fixed"
                                                                    : "backtracking");
            },
            [](ExperimentConfig& c, const std::string& v) {
              if (v == "fixed") {
                c.gd.step_rule = StepRule::kFixed;
              } else if (v == "backtracking") {
                c.gd.step_rule = StepRule::kBacktracking;
              } else {
                throw ConfigError("algorithm.step_rule must be backtracking or fixed");
              }
            }},
      ANTIDOTE_FIELD("algorithm.step", gd.step, ToDouble),
      ANTIDOTE_FIELD("algorithm.initial_step", gd.initial_step, ToDouble),
      ANTIDOTE_FIELD("algorithm.shrink_factor", gd.shrink_factor, ToDouble),
      ANTIDOTE_FIELD("algorithm.max_trials", gd.max_trials, ToInt),
      ANTIDOTE_FIELD("algorithm.converge_tol", gd.converge_tol, ToDouble),
      Field{"algorithm.init_value",
            [](const ExperimentConfig& c) {
              return std::isnan(c.gd.init_value) ? std::string("mean")
                                                 : FormatDouble(c.gd.init_value);
            },
            [](ExperimentConfig& c, const std::string& v) {
              c.gd.init_value = v == "mean" ? std::numeric_limits<double>::quiet_NaN()
                                            : ToDouble("algorithm.init_value", v);
            }},
      ANTIDOTE_FIELD("algorithm.seed", gd.seed, ToSeed),
      ANTIDOTE_FIELD("algorithm.restarts", gd.restarts, ToInt),
      ANTIDOTE_FIELD("algorithm.warm_start", gd.warm_start_factorization, ToBool),
      ANTIDOTE_TEXT_FIELD("algorithm.factors", factors_path),

      ANTIDOTE_FIELD("evaluation.enabled", evaluate, ToBool),
      Field{"evaluation.topk",
            [](const ExperimentConfig& c) {
              return JoinList(c.topk, [](int k) { return std::to_string(k); });
            },
            [](ExperimentConfig& c, const std::string& v) {
              c.topk.clear();
              for (const auto& s : SplitList(v)) c.topk.push_back(ToInt("evaluation.topk", s));
            }},

      Field{"validation.ranks",
            [](const ExperimentConfig& c) {
              return JoinList(c.grid_ranks, [](int k) { return std::to_string(k); });
            },
            [](ExperimentConfig& c, const std::string& v) {
              c.grid_ranks.clear();
              for (const auto& s : SplitList(v)) {
                c.grid_ranks.push_back(ToInt("validation.ranks", s));
              }
            }},
      Field{"validation.regs",
            [](const ExperimentConfig& c) {
              return JoinList(c.grid_regs, [](double x) { return FormatDouble(x); });
            },
            [](ExperimentConfig& c, const std::string& v) {
              c.grid_regs.clear();
              for (const auto& s : SplitList(v)) {
                c.grid_regs.push_back(ToDouble("validation.regs", s));
              }
            }},
      ANTIDOTE_FIELD("validation.splits", grid_splits, ToInt),
      ANTIDOTE_FIELD("validation.fraction", grid_fraction, ToDouble),
      ANTIDOTE_FIELD("validation.seed", grid_seed, ToSeed),

      ANTIDOTE_TEXT_FIELD("output.dir", out_dir),
      ANTIDOTE_FIELD("output.factors", write_factors, ToBool),
  };
  return fields;
}

#undef ANTIDOTE_FIELD
#undef ANTIDOTE_TEXT_FIELD

// ---------------------------------------------------------------------------

template <typename F>
auto Stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Error& e) {
    throw e.WithContext(name);
  }
}

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

bool UsesFactorsFile(const ExperimentConfig& config) {
  return config.algorithm == Algorithm::kHeuristic2 && !config.factors_path.empty();
}

FactorModel LoadFactors(const std::string& path, const RatingDataset& train) {
  std::ifstream in = OpenInput(path);
  FactorModel model = ReadFactorModel(in);
  if (model.num_users() != train.num_users() || model.num_items() != train.num_items()) {
    throw ValidationError("factors in '" + path + "' are for " +
                          std::to_string(model.num_users()) + "x" +
                          std::to_string(model.num_items()) + ", dataset is " +
                          std::to_string(train.num_users()) + "x" +
                          std::to_string(train.num_items()));
  }
  return model;
}

AntidoteMatrix Generate(const ExperimentConfig& config, const PreparedData& data,
                        const ObjectiveSpec& spec, const Budget& budget,
                        const FactorModel& base, const Eigen::MatrixXd& base_predictions,
                        ExperimentReport* report) {
  const RatingDataset& train = data.train;
  switch (config.algorithm) {
    case Algorithm::kNone:
      return AntidoteMatrix::Empty(train.num_items(), train.bounds());
    case Algorithm::kGdRandom:
    case Algorithm::kGdFixed: {
      GdOptions gd = config.gd;
      gd.init = config.algorithm == Algorithm::kGdRandom ? InitMode::kRandom
                                                         : InitMode::kFixed;
      OptimizationResult result =
          OptimizeAntidote(train, spec, budget, config.rank, config.reg, gd, config.als);
      if (report != nullptr) {
        report->trace = result.trace;
        report->restart_objectives = result.restart_objectives;
        report->best_restart = result.best_restart;
        report->line_search_exhausted = result.line_search_exhausted;
      }
      return result.antidote;
    }
    case Algorithm::kHeuristic1: {
      AntidoteMatrix out = Heuristic1(train, spec, budget, config.rank, config.reg,
                                      config.als, config.gd.init_value);
      if (report != nullptr) {
        Eigen::MatrixXd g = ObjectiveGradient(spec, train, base_predictions);
        AntidoteMatrix companion = Heuristic2(base, g, Budget::Users(1), train.bounds());
        report->heuristic_sign_agreement = SignAgreement(out, companion);
      }
      return out;
    }
    case Algorithm::kHeuristic2: {
      Eigen::MatrixXd g = ObjectiveGradient(spec, train, base_predictions);
      return Heuristic2(base, g, budget, train.bounds());
    }
    case Algorithm::kBaselineMin:
      return BaselineMin(train, budget);
    case Algorithm::kBaselineMax:
      return BaselineMax(train, budget);
    case Algorithm::kRandom:
      return RandomAntidote(budget.Resolve(train.num_users()), train.num_items(),
                            train.bounds(), config.gd.seed);
  }
  throw ConfigError("unhandled algorithm");
}

std::string Sig6(double v) {
  if (std::isnan(v)) return "nan";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6g", v);
  return buffer;
}

std::string Full(double v) { return std::isnan(v) ? "nan" : FormatDouble(v); }

std::string Optional6(const std::optional<double>& v) { return v ? Sig6(*v) : "n/a"; }
std::string OptionalFull(const std::optional<double>& v) { return v ? Full(*v) : "n/a"; }

std::string BudgetLabel(const std::string& budget) {
  std::string out;
  for (char c : budget) {
    if (c == '%') {
      out += "pct";
    } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '.') {
      out += c;
    } else {
      out += '_';
    }
  }
  return out;
}

void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

const char* AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kNone:
      return "none";
    case Algorithm::kGdRandom:
      return "gd_random";
    case Algorithm::kGdFixed:
      return "gd_fixed";
    case Algorithm::kHeuristic1:
      return "heuristic1";
    case Algorithm::kHeuristic2:
      return "heuristic2";
    case Algorithm::kBaselineMin:
      return "baseline_min";
    case Algorithm::kBaselineMax:
      return "baseline_max";
    case Algorithm::kRandom:
      return "random";
  }
  return "?";
}

Algorithm ParseAlgorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::kNone, Algorithm::kGdRandom, Algorithm::kGdFixed,
                      Algorithm::kHeuristic1, Algorithm::kHeuristic2,
                      Algorithm::kBaselineMin, Algorithm::kBaselineMax,
                      Algorithm::kRandom}) {
    if (name == AlgorithmName(a)) return a;
  }
  throw ConfigError("unknown algorithm '" + name + "'");
}

ExperimentConfig ExperimentConfig::FromKeyValues(const KeyValues& values) {
  return FromKeyValues(values, ExperimentConfig{});
}

ExperimentConfig ExperimentConfig::FromKeyValues(const KeyValues& values,
                                                 const ExperimentConfig& base) {
  std::map<std::string, const Field*> by_key;
  for (const Field& f : Fields()) by_key[f.key] = &f;
  ExperimentConfig config = base;
  for (const auto& [key, value] : values) {
    auto it = by_key.find(key);
    if (it == by_key.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second->set(config, value);
  }
  return config;
}

KeyValues ExperimentConfig::ToKeyValues() const {
  KeyValues out;
  for (const Field& f : Fields()) out.emplace_back(f.key, f.get(*this));
  return out;
}

std::vector<std::string> ExperimentConfig::Keys() {
  std::vector<std::string> keys;
  for (const Field& f : Fields()) keys.emplace_back(f.key);
  return keys;
}

void ExperimentConfig::Validate() const {
  if (ratings_path.empty()) throw ConfigError("dataset.ratings is required");
  if (format != "movielens" && format != "csv") {
    throw ConfigError("dataset.format must be movielens or csv");
  }
  if (!(bounds.min < bounds.max)) throw ConfigError("rating_min must be below rating_max");
  if (top_items < 0) throw ConfigError("dataset.top_items must be non-negative");
  if (user_filter != "none" && user_filter != "most_active" &&
      user_filter != "random_subset") {
    throw ConfigError("dataset.user_filter must be none, most_active or random_subset");
  }
  if (user_filter != "none" && users < 1) {
    throw ConfigError("dataset.users must be positive when filtering users");
  }
  if (!movies_path.empty() && !groups_path.empty()) {
    throw ConfigError("set at most one of dataset.movies and dataset.groups");
  }
  if (!movies_path.empty() && group_axis != GroupAxis::kItems) {
    throw ConfigError("genre groups are on the items axis");
  }
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    throw ConfigError("holdout.fraction must lie in [0, 1)");
  }
  if (rank < 1) throw ConfigError("factorization.rank must be at least 1");
  if (!(reg >= 0.0)) throw ConfigError("factorization.reg must be non-negative");
  als.Validate();
  gd.Validate();
  if (budgets.empty()) throw ConfigError("algorithm.budget is empty");
  for (const auto& b : budgets) Budget::Parse(b);
  for (int k : topk) {
    if (k < 1) throw ConfigError("evaluation.topk entries must be positive");
  }
  if (objective == ObjectiveKind::kGroupFairness && movies_path.empty() &&
      groups_path.empty()) {
    throw ConfigError("group_fairness needs dataset.movies or dataset.groups");
  }
  if (objective != ObjectiveKind::kPolarization && direction != Direction::kMinimize) {
    throw ConfigError(std::string(ObjectiveKindName(objective)) + " can only be minimized");
  }
  bool min_pol = objective == ObjectiveKind::kPolarization &&
                 direction == Direction::kMinimize;
  bool max_pol = objective == ObjectiveKind::kPolarization &&
                 direction == Direction::kMaximize;
  switch (algorithm) {
    case Algorithm::kHeuristic1:
    case Algorithm::kHeuristic2:
      if (direction != Direction::kMinimize) {
        throw ConfigError(std::string(AlgorithmName(algorithm)) +
                          " only supports minimization");
      }
      break;
    case Algorithm::kBaselineMin:
      if (!min_pol) throw ConfigError("baseline_min pairs with minimize polarization");
      break;
    case Algorithm::kBaselineMax:
      if (!max_pol) throw ConfigError("baseline_max pairs with maximize polarization");
      break;
    default:
      break;
  }
  if (grid_splits < 1) throw ConfigError("validation.splits must be at least 1");
  if (!(grid_fraction > 0.0 && grid_fraction < 1.0)) {
    throw ConfigError("validation.fraction must lie in (0, 1)");
  }
}

ObjectiveSpec ExperimentConfig::Objective(std::optional<GroupAssignment> groups) const {
  ObjectiveSpec spec;
  spec.kind = objective;
  spec.direction = direction;
  if (objective == ObjectiveKind::kGroupFairness) spec.groups = std::move(groups);
  spec.Validate();
  return spec;
}

KeyValues ReportConfigEcho(std::istream& in) {
  std::string line;
  std::ostringstream section;
  bool inside = false;
  bool found = false;
  while (std::getline(in, line)) {
    if (line == "[config]") {
      inside = found = true;
      continue;
    }
    if (inside && !line.empty() && line.front() == '[') break;
    if (inside) section << line << '\n';
  }
  if (!found) throw ParseError("report has no [config] section");
  std::istringstream echo(section.str());
  return ParseKeyValues(echo);
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in = OpenInput(path);
  std::string first;
  std::getline(in, first);
  in.clear();
  in.seekg(0);
  if (first == kReportHeader) return ExperimentConfig::FromKeyValues(ReportConfigEcho(in));
  return ExperimentConfig::FromKeyValues(ParseKeyValues(in));
}

std::vector<ExperimentConfig> ExpandBudgetSweep(const ExperimentConfig& config) {
  if (config.budgets.size() <= 1) return {config};
  std::vector<ExperimentConfig> out;
  std::set<std::string> labels;
  for (const std::string& budget : config.budgets) {
    ExperimentConfig one = config;
    one.budgets = {budget};
    std::string label = BudgetLabel(budget);
    if (!labels.insert(label).second) throw ConfigError("duplicate budget " + budget);
    one.out_dir = (std::filesystem::path(config.out_dir) / ("budget_" + label)).string();
    out.push_back(std::move(one));
  }
  return out;
}

PreparedData PrepareData(const ExperimentConfig& config) {
  PreparedData data;
  RatingDataset raw = Stage("load", [&] {
    std::ifstream in = OpenInput(config.ratings_path);
    return config.format == "csv" ? LoadRatingsCsv(in, config.bounds)
                                  : LoadMovieLens(in, config.separator, config.bounds);
  });
  data.filtered = Stage("filter", [&] {
    RatingDataset d = std::move(raw);
    if (config.top_items > 0) d = FilterTopItems(d, config.top_items);
    if (config.user_filter == "most_active") {
      d = FilterUsers(d, UserFilterMode::kMostActive, config.users, config.filter_seed);
    } else if (config.user_filter == "random_subset") {
      d = FilterUsers(d, UserFilterMode::kRandomSubset, config.users, config.filter_seed);
    }
    return d;
  });
  data.groups = Stage("groups", [&]() -> std::optional<GroupAssignment> {
    if (!config.movies_path.empty()) {
      std::ifstream in = OpenInput(config.movies_path);
      return LoadGenreGroups(in, data.filtered, GenrePolicy::kFirstListed);
    }
    if (!config.groups_path.empty()) {
      std::ifstream in = OpenInput(config.groups_path);
      return LoadGroupsCsv(in, data.filtered, config.group_axis);
    }
    return std::nullopt;
  });
  Stage("split", [&] {
    if (config.holdout_fraction > 0.0) {
      SplitPair split =
          HoldoutSplit(data.filtered, config.holdout_fraction, config.holdout_seed);
      data.train = std::move(split.train);
      data.test = std::move(split.test);
    } else {
      data.train = data.filtered;
    }
  });
  return data;
}

GeneratedAntidote GenerateOnly(const ExperimentConfig& config) {
  Stage("config", [&] { config.Validate(); });
  if (config.budgets.size() != 1) throw ConfigError("config: expected a single budget");
  GeneratedAntidote out{PrepareData(config), {}};
  const RatingDataset& train = out.data.train;
  ObjectiveSpec spec = Stage("config", [&] { return config.Objective(out.data.groups); });
  Budget budget = Budget::Parse(config.budgets.front());
  FactorModel base = Stage("factorize", [&] {
    return UsesFactorsFile(config)
               ? LoadFactors(config.factors_path, train)
               : AlsFactorize(train, config.rank, config.reg, config.als);
  });
  Eigen::MatrixXd predictions = Predict(base);
  out.antidote = Stage("antidote", [&] {
    return Generate(config, out.data, spec, budget, base, predictions, nullptr);
  });
  return out;
}

ExperimentReport RunExperiment(const ExperimentConfig& config,
                               const AntidoteMatrix* external,
                               const std::string& external_label) {
  Stage("config", [&] { config.Validate(); });
  if (config.budgets.size() != 1) {
    throw ConfigError("config: run one budget at a time (see ExpandBudgetSweep)");
  }
  ExperimentReport report;
  report.config_echo = config.ToKeyValues();
  report.algorithm = external ? "external:" + external_label : AlgorithmName(config.algorithm);
  report.objective = ObjectiveKindName(config.objective);
  report.direction = DirectionName(config.direction);

  PreparedData data = PrepareData(config);
  const RatingDataset& train = data.train;
  const RatingDataset& eval = data.evaluation();
  report.held_out = data.test.has_value();
  report.user_ids = train.user_ids();
  report.item_ids = train.item_ids();
  ObjectiveSpec spec = Stage("config", [&] { return config.Objective(data.groups); });
  Budget budget = Budget::Parse(config.budgets.front());
  report.budget = external ? "external" : budget.ToString();

  if (!config.movies_path.empty()) {
    report.notes.push_back("groups: item genre, first listed genre of each movie");
  }
  if (report.held_out) {
    report.notes.push_back("objectives and per-entity RMSE use the held-out ratings");
  }

  FactorModel base = Stage("factorize", [&] {
    return !external && UsesFactorsFile(config)
               ? LoadFactors(config.factors_path, train)
               : AlsFactorize(train, config.rank, config.reg, config.als);
  });
  if (!external && UsesFactorsFile(config)) {
    report.notes.push_back("heuristic2 used the supplied factors; no factorization ran "
                           "before generation");
  }
  const Eigen::MatrixXd before = Predict(base);
  if (config.write_factors) report.factors = base;

  Stage("evaluate", [&] {
    report.objective_before = EvaluateObjective(spec, eval, before);
    report.rmse_train_before = Rmse(train, before);
    if (data.test) report.rmse_test_before = Rmse(*data.test, before);
    report.per_user_rmse_before = PerUserRmse(eval, before, EmptyScope::kNaN);
    report.per_item_variance_before = PerItemVariance(before);
    if (data.groups) {
      report.group_names = data.groups->names();
      report.per_group_rmse_before =
          PerGroupRmse(eval, before, *data.groups, EmptyScope::kNaN);
    }
  });

  report.antidote = Stage("antidote", [&] {
    if (external) {
      if (external->num_items() != train.num_items()) {
        throw ValidationError("antidote has " + std::to_string(external->num_items()) +
                              " columns, dataset has " +
                              std::to_string(train.num_items()) + " items");
      }
      return *external;
    }
    return Generate(config, data, spec, budget, base, before, &report);
  });
  report.antidote_users = report.antidote.num_users();
  if (!external && (config.algorithm == Algorithm::kGdRandom ||
                    config.algorithm == Algorithm::kGdFixed)) {
    report.notes.push_back(
        std::string("gd: ") +
        (config.gd.step_rule == StepRule::kBacktracking
             ? "backtracking line search, every trial refactorized"
             : "fixed step") +
        (config.gd.warm_start_factorization ? "; factorizations warm-started" : ""));
  }

  FactorModel joint = Stage("refactorize", [&] {
    if (!external && config.algorithm == Algorithm::kNone) return base;
    return AlsFactorizeJoint(train, report.antidote, config.rank, config.reg, config.als);
  });
  const Eigen::MatrixXd after = Predict(joint);

  Stage("evaluate", [&] {
    report.objective_after = EvaluateObjective(spec, eval, after);
    report.rmse_train_after = Rmse(train, after);
    if (data.test) report.rmse_test_after = Rmse(*data.test, after);
    report.per_user_rmse_after = PerUserRmse(eval, after, EmptyScope::kNaN);
    report.per_item_variance_after = PerItemVariance(after);
    if (data.groups) {
      report.per_group_rmse_after = PerGroupRmse(eval, after, *data.groups, EmptyScope::kNaN);
    }
    for (const auto& [k, j] : TopKJaccard(before, after, train, config.topk)) {
      report.topk_jaccard.emplace_back(k, j);
    }
  });
  return report;
}

void WriteReport(const ExperimentReport& r, std::ostream& out) {
  std::ostringstream s;
  s << kReportHeader << "\n\n[summary]\n";
  s << "algorithm = " << r.algorithm << '\n';
  s << "budget = " << r.budget << '\n';
  s << "antidote_users = " << r.antidote_users << '\n';
  s << "objective = " << r.objective << '\n';
  s << "direction = " << r.direction << '\n';
  s << "evaluated_on = " << (r.held_out ? "held_out" : "train") << '\n';
  s << "objective_before = " << Sig6(r.objective_before) << '\n';
  s << "objective_after = " << Sig6(r.objective_after) << '\n';
  double change = r.objective_before != 0.0
                      ? (r.objective_after - r.objective_before) / r.objective_before
                      : 0.0;
  s << "objective_relative_change = " << Sig6(change) << '\n';
  s << "rmse_train_before = " << Sig6(r.rmse_train_before) << '\n';
  s << "rmse_train_after = " << Sig6(r.rmse_train_after) << '\n';
  s << "rmse_test_before = " << Optional6(r.rmse_test_before) << '\n';
  s << "rmse_test_after = " << Optional6(r.rmse_test_after) << '\n';
  if (!r.trace.empty()) {
    s << "gd_steps = " << r.trace.size() - 1 << '\n';
    s << "best_restart = " << r.best_restart << '\n';
    s << "line_search_exhausted = " << (r.line_search_exhausted ? "true" : "false") << '\n';
  }
  if (r.heuristic_sign_agreement) {
    s << "heuristic_sign_agreement = " << Sig6(*r.heuristic_sign_agreement) << '\n';
  }

  if (!r.notes.empty()) {
    s << "\n[notes]\n";
    for (const auto& note : r.notes) s << "- " << note << '\n';
  }
  s << "\n[topk_jaccard]\nk,mean_jaccard\n";
  for (const auto& [k, j] : r.topk_jaccard) s << k << ',' << Sig6(j) << '\n';
  if (!r.group_names.empty()) {
    s << "\n[per_group_rmse]\ngroup,before,after\n";
    for (size_t g = 0; g < r.group_names.size(); ++g) {
      s << r.group_names[g] << ',' << Sig6(r.per_group_rmse_before[g]) << ','
        << Sig6(r.per_group_rmse_after[g]) << '\n';
    }
  }
  if (!r.trace.empty()) {
    s << "\n[trace]\nstep,objective\n";
    for (size_t t = 0; t < r.trace.size(); ++t) s << t << ',' << Sig6(r.trace[t]) << '\n';
    s << "\n[restarts]\nrestart,final_objective\n";
    for (size_t t = 0; t < r.restart_objectives.size(); ++t) {
      s << t << ',' << Sig6(r.restart_objectives[t]) << '\n';
    }
  }

  s << "\n[config]\n";
  for (const auto& [key, value] : r.config_echo) s << key << " = " << value << '\n';

  s << "\n[machine]\n";
  s << "objective_before = " << Full(r.objective_before) << '\n';
  s << "objective_after = " << Full(r.objective_after) << '\n';
  s << "rmse_train_before = " << Full(r.rmse_train_before) << '\n';
  s << "rmse_train_after = " << Full(r.rmse_train_after) << '\n';
  s << "rmse_test_before = " << OptionalFull(r.rmse_test_before) << '\n';
  s << "rmse_test_after = " << OptionalFull(r.rmse_test_after) << '\n';
  s << "topk_jaccard = "
    << JoinList(r.topk_jaccard,
                [](const std::pair<int, double>& p) {
                  return std::to_string(p.first) + ":" + Full(p.second);
                })
    << '\n';
  s << "trace = " << JoinList(r.trace, Full) << '\n';
  out << s.str();
}

void WriteReportFiles(const ExperimentReport& r, const std::string& dir) {
  std::filesystem::path root(dir);
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());

  std::ostringstream report;
  WriteReport(r, report);
  WriteFile(root / "report.txt", report.str());

  std::ostringstream antidote;
  WriteAntidoteCsv(r.antidote, r.item_ids, antidote);
  WriteFile(root / "antidote.csv", antidote.str());

  std::ostringstream users;
  users << "user_id,rmse_before,rmse_after\n";
  for (size_t i = 0; i < r.user_ids.size(); ++i) {
    users << r.user_ids[i] << ',' << Full(r.per_user_rmse_before[i]) << ','
          << Full(r.per_user_rmse_after[i]) << '\n';
  }
  WriteFile(root / "per_user_rmse.csv", users.str());

  std::ostringstream items;
  items << "item_id,variance_before,variance_after\n";
  for (size_t j = 0; j < r.item_ids.size(); ++j) {
    items << r.item_ids[j] << ',' << Full(r.per_item_variance_before[j]) << ','
          << Full(r.per_item_variance_after[j]) << '\n';
  }
  WriteFile(root / "per_item_variance.csv", items.str());

  std::ostringstream groups;
  groups << "group,rmse_before,rmse_after\n";
  for (size_t g = 0; g < r.group_names.size(); ++g) {
    groups << r.group_names[g] << ',' << Full(r.per_group_rmse_before[g]) << ','
           << Full(r.per_group_rmse_after[g]) << '\n';
  }
  WriteFile(root / "per_group_rmse.csv", groups.str());

  std::ostringstream topk;
  topk << "k,mean_jaccard\n";
  for (const auto& [k, j] : r.topk_jaccard) topk << k << ',' << Full(j) << '\n';
  WriteFile(root / "topk_jaccard.csv", topk.str());

  if (r.factors) {
    std::ostringstream factors;
    WriteFactorModel(*r.factors, factors);
    WriteFile(root / "factors.txt", factors.str());
  }
}

}  // namespace antidote
