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

#include "antidote/antidote.h"

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>

#include "antidote/error.h"

namespace antidote {
namespace {

double MeanRating(const RatingDataset& train) {
  if (train.num_entries() == 0) throw ArgumentError("dataset has no ratings");
  double sum = 0.0;
  for (const Rating& r : train.entries()) sum += r.value;
  return sum / train.num_entries();
}

bool Improves(const ObjectiveSpec& spec, double candidate, double current) {
  return spec.minimize() ? candidate < current : candidate > current;
}

Eigen::MatrixXd ReplicateRow(const Eigen::RowVectorXd& row, int copies) {
  return row.replicate(copies, 1);
}

// Bound opposing the sign of each partial derivative; zero goes to the max.
Eigen::RowVectorXd SignRule(const Eigen::RowVectorXd& partials,
                            const RatingBounds& bounds) {
  Eigen::RowVectorXd row(partials.size());
  for (Eigen::Index j = 0; j < partials.size(); ++j) {
    row(j) = partials(j) > 0.0 ? bounds.min : bounds.max;
  }
  return row;
}

struct Iterate {
  Eigen::MatrixXd values;
  FactorModel model;
  double objective = 0.0;
};

class ProjectedGradient {
 public:
  ProjectedGradient(const RatingDataset& train, const ObjectiveSpec& spec, int rank,
                    double reg, const GdOptions& gd, const AlsOptions& als)
      : train_(train), spec_(spec), rank_(rank), reg_(reg), gd_(gd), als_(als) {}

  Iterate Evaluate(Eigen::MatrixXd values, const FactorModel* warm) const {
    AlsOptions opts = als_;
    if (warm != nullptr && gd_.warm_start_factorization) opts.warm_start = *warm;
    Iterate it;
    AntidoteMatrix antidote(values, train_.bounds());
    it.model = AlsFactorizeJoint(train_, antidote, rank_, reg_, opts);
    it.objective = EvaluateObjective(spec_, train_, Predict(it.model));
    it.values = std::move(values);
    return it;
  }

  // Runs from `start` until convergence; fills `trace`.
  Iterate Run(Eigen::MatrixXd start, std::vector<double>* trace, bool* exhausted) const {
    const RatingBounds& bounds = train_.bounds();
    ProjectOntoBounds(bounds, &start);
    Iterate current = Evaluate(std::move(start), nullptr);
    trace->assign(1, current.objective);
    *exhausted = false;
    const double sign = spec_.minimize() ? -1.0 : 1.0;

    for (int iter = 0; iter < gd_.max_iters; ++iter) {
      Eigen::MatrixXd g = ObjectiveGradient(spec_, train_, Predict(current.model));
      Eigen::MatrixXd partials = AntidoteGradient(current.model, train_, g);
      double scale = partials.cwiseAbs().maxCoeff();
      if (!(scale > 0.0) || !std::isfinite(scale)) break;
      Eigen::MatrixXd direction = (sign / scale) * partials;

      bool accepted = false;
      Iterate next;
      if (gd_.step_rule == StepRule::kFixed) {
        Eigen::MatrixXd x = current.values + gd_.step * direction;
        ProjectOntoBounds(bounds, &x);
        next = Evaluate(std::move(x), &current.model);
        accepted = true;
      } else {
        double step = gd_.initial_step;
        for (int trial = 0; trial < gd_.max_trials; ++trial, step *= gd_.shrink_factor) {
          Eigen::MatrixXd x = current.values + step * direction;
          ProjectOntoBounds(bounds, &x);
          if (x == current.values) continue;
          Iterate candidate = Evaluate(std::move(x), &current.model);
          if (Improves(spec_, candidate.objective, current.objective)) {
            next = std::move(candidate);
            accepted = true;
            break;
          }
        }
      }
      if (!accepted) {
        *exhausted = true;
        break;
      }
      double previous = current.objective;
      current = std::move(next);
      trace->push_back(current.objective);
      double denom = std::max(std::abs(previous), std::numeric_limits<double>::min());
      if (std::abs(current.objective - previous) / denom < gd_.converge_tol) break;
    }
    return current;
  }

 private:
  const RatingDataset& train_;
  const ObjectiveSpec& spec_;
  int rank_;
  double reg_;
  const GdOptions& gd_;
  const AlsOptions& als_;
};

}  // namespace

Budget Budget::Users(int count) {
  if (count < 1) throw ConfigError("antidote budget must be at least one user");
  Budget b;
  b.count_ = count;
  return b;
}

Budget Budget::Fraction(double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ConfigError("antidote budget fraction must lie in (0, 1]");
  }
  Budget b;
  b.is_fraction_ = true;
  b.fraction_ = fraction;
  return b;
}

Budget Budget::Parse(const std::string& text) {
  if (text.empty()) throw ConfigError("empty budget");
  try {
    size_t used = 0;
    if (text.back() == '%') {
      double percent = std::stod(text.substr(0, text.size() - 1), &used);
      if (used != text.size() - 1) throw std::invalid_argument(text);
      return Fraction(percent / 100.0);
    }
    if (text.find_first_of(".eE") != std::string::npos) {
      double fraction = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return Fraction(fraction);
    }
    long count = std::stol(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return Users(static_cast<int>(count));
  } catch (const std::logic_error&) {
    throw ConfigError("malformed budget '" + text + "'");
  }
}

int Budget::Resolve(int num_users) const {
  if (!is_fraction_) return count_;
  return std::max(1, static_cast<int>(std::ceil(fraction_ * num_users - 1e-9)));
}

std::string Budget::ToString() const {
  if (!is_fraction_) return std::to_string(count_);
  std::ostringstream out;
  out << fraction_ * 100.0 << '%';
  return out.str();
}

void GdOptions::Validate() const {
  if (max_iters < 1) throw ConfigError("gd max_iters must be at least 1");
  if (!(shrink_factor > 0.0 && shrink_factor < 1.0)) {
    throw ConfigError("gd shrink_factor must lie in (0, 1)");
  }
  if (max_trials < 1) throw ConfigError("gd max_trials must be at least 1");
  if (restarts < 1) throw ConfigError("gd restarts must be at least 1");
  if (!(step > 0.0) || !(initial_step > 0.0)) {
    throw ConfigError("gd step sizes must be positive");
  }
  if (!(converge_tol > 0.0)) throw ConfigError("gd converge_tol must be positive");
}

Eigen::MatrixXd AntidoteGradient(const FactorModel& model, const RatingDataset& train,
                                 const Eigen::MatrixXd& gradient) {
  if (model.num_antidote_users() < 1) {
    throw ArgumentError("antidote gradient needs at least one antidote user");
  }
  if (gradient.rows() != model.num_users() || gradient.cols() != model.num_items() ||
      train.num_users() != model.num_users() || train.num_items() != model.num_items()) {
    throw ArgumentError("gradient, dataset and model dimensions disagree");
  }
  const int rank = model.rank;
  const Eigen::MatrixXd antidote_gram =
      model.antidote_users * model.antidote_users.transpose();
  // Column j of `pulled` is U g_j.
  const Eigen::MatrixXd pulled = model.users * gradient;
  Eigen::MatrixXd w(rank, model.num_items());
  Eigen::MatrixXd s(rank, rank);
  for (int j = 0; j < model.num_items(); ++j) {
    s = antidote_gram;
    s.diagonal().array() += model.reg;
    for (const Rating& r : train.item_ratings(j)) {
      s.selfadjointView<Eigen::Lower>().rankUpdate(model.users.col(r.user));
    }
    s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(s);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("singular sensitivity system for item " +
                           train.item_ids()[j]);
    }
    w.col(j) = llt.solve(pulled.col(j));
  }
  return model.antidote_users.transpose() * w;
}

OptimizationResult OptimizeAntidote(const RatingDataset& train, const ObjectiveSpec& spec,
                                    const Budget& budget, int rank, double reg,
                                    const GdOptions& gd, const AlsOptions& als) {
  spec.Validate();
  gd.Validate();
  const int n_antidote = budget.Resolve(train.num_users());
  const int d = train.num_items();
  const RatingBounds& bounds = train.bounds();
  ProjectedGradient solver(train, spec, rank, reg, gd, als);

  OptimizationResult result;
  const int runs = gd.init == InitMode::kRandom ? gd.restarts : 1;
  Iterate best;
  for (int run = 0; run < runs; ++run) {
    Eigen::MatrixXd start;
    if (gd.init == InitMode::kRandom) {
      start = RandomAntidote(n_antidote, d, bounds, gd.seed + run).values();
    } else {
      double value = std::isnan(gd.init_value) ? MeanRating(train) : gd.init_value;
      start = Eigen::MatrixXd::Constant(n_antidote, d, value);
    }
    std::vector<double> trace;
    bool exhausted = false;
    Iterate final_iterate = solver.Run(std::move(start), &trace, &exhausted);
    result.restart_objectives.push_back(final_iterate.objective);
    if (run == 0 || Improves(spec, final_iterate.objective, best.objective)) {
      best = std::move(final_iterate);
      result.best_restart = run;
      result.trace = std::move(trace);
      result.line_search_exhausted = exhausted;
    }
  }
  result.antidote = AntidoteMatrix(std::move(best.values), bounds);
  result.model = std::move(best.model);
  return result;
}

AntidoteMatrix Heuristic1(const RatingDataset& train, const ObjectiveSpec& spec,
                          const Budget& budget, int rank, double reg,
                          const AlsOptions& als, double init_value) {
  spec.Validate();
  if (!spec.minimize()) throw ConfigError("heuristic1 only supports minimization");
  const RatingBounds& bounds = train.bounds();
  if (std::isnan(init_value)) init_value = MeanRating(train);
  AntidoteMatrix seed_row(
      Eigen::MatrixXd::Constant(1, train.num_items(), bounds.Clamp(init_value)), bounds);
  FactorModel model = AlsFactorizeJoint(train, seed_row, rank, reg, als);
  Eigen::MatrixXd g = ObjectiveGradient(spec, train, Predict(model));
  Eigen::RowVectorXd partials = AntidoteGradient(model, train, g).row(0);
  return AntidoteMatrix(
      ReplicateRow(SignRule(partials, bounds), budget.Resolve(train.num_users())), bounds);
}

AntidoteMatrix Heuristic2(const FactorModel& model, const Eigen::MatrixXd& gradient,
                          const Budget& budget, const RatingBounds& bounds) {
  if (gradient.rows() != model.num_users() || gradient.cols() != model.num_items()) {
    throw ArgumentError("gradient shape does not match the factor model");
  }
  // d[j] = g_j' U' 1 = sum_i g_ij * (sum of the entries of u_i).
  Eigen::RowVectorXd user_sums = model.users.colwise().sum();
  Eigen::RowVectorXd direction = user_sums * gradient;
  return AntidoteMatrix(
      ReplicateRow(SignRule(direction, bounds), budget.Resolve(model.num_users())),
      bounds);
}

AntidoteMatrix BaselineMin(const RatingDataset& train, const Budget& budget) {
  Eigen::RowVectorXd means(train.num_items());
  for (int j = 0; j < train.num_items(); ++j) {
    auto column = train.item_ratings(j);
    if (column.empty()) {
      throw ArgumentError("item " + train.item_ids()[j] + " has no known ratings");
    }
    double sum = 0.0;
    for (const Rating& r : column) sum += r.value;
    means(j) = train.bounds().Clamp(sum / column.size());
  }
  return AntidoteMatrix(ReplicateRow(means, budget.Resolve(train.num_users())),
                        train.bounds());
}

AntidoteMatrix BaselineMax(const RatingDataset& train, const Budget& budget) {
  const int n_antidote = budget.Resolve(train.num_users());
  const int high = (n_antidote + 1) / 2;
  Eigen::MatrixXd values(n_antidote, train.num_items());
  values.topRows(high).setConstant(train.bounds().max);
  values.bottomRows(n_antidote - high).setConstant(train.bounds().min);
  return AntidoteMatrix(std::move(values), train.bounds());
}

AntidoteMatrix RandomAntidote(int num_antidote_users, int num_items,
                              const RatingBounds& bounds, uint64_t seed) {
  if (num_antidote_users < 0 || num_items < 0) {
    throw ArgumentError("negative antidote dimensions");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(bounds.min, bounds.max);
  Eigen::MatrixXd values(num_antidote_users, num_items);
  for (Eigen::Index k = 0; k < values.size(); ++k) values.data()[k] = uniform(rng);
  return AntidoteMatrix(std::move(values), bounds);
}

double SignAgreement(const AntidoteMatrix& a, const AntidoteMatrix& b) {
  if (a.num_items() != b.num_items() || a.num_users() < 1 || b.num_users() < 1) {
    throw ArgumentError("sign agreement needs two non-empty antidotes of equal width");
  }
  if (a.num_items() == 0) return 1.0;
  int same = 0;
  for (int j = 0; j < a.num_items(); ++j) same += a(0, j) == b(0, j);
  return static_cast<double>(same) / a.num_items();
}

}  // namespace antidote
