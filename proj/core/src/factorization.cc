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

#include "antidote/factorization.h"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>

#include "antidote/error.h"
#include "antidote/evaluation.h"

namespace antidote {
namespace {

// Cholesky solve of a small SPD system. A pivot ratio below this threshold is
// treated as singular.
constexpr double kSingularRatio = 1e-13;

Eigen::VectorXd SolveSpd(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                         const char* what, int index) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  bool singular = llt.info() != Eigen::Success;
  if (!singular) {
    Eigen::VectorXd pivots = llt.matrixLLT().diagonal().array().square();
    singular = !(pivots.minCoeff() > kSingularRatio * a.diagonal().cwiseAbs().maxCoeff());
  }
  if (singular) {
    throw NumericalError("singular normal equations for " + std::string(what) + " " +
                         std::to_string(index));
  }
  return llt.solve(b);
}

void SolveUsers(const RatingDataset& train, const Eigen::MatrixXd& items, double reg,
                Eigen::MatrixXd* users) {
  const Eigen::Index rank = items.rows();
  Eigen::MatrixXd a(rank, rank);
  Eigen::VectorXd b(rank);
  for (int i = 0; i < train.num_users(); ++i) {
    if (train.user_count(i) == 0 && reg > 0.0) {
      users->col(i).setZero();
      continue;
    }
    a.setIdentity();
    a *= reg;
    b.setZero();
    for (const Rating& r : train.user_ratings(i)) {
      a.selfadjointView<Eigen::Lower>().rankUpdate(items.col(r.item));
      b.noalias() += r.value * items.col(r.item);
    }
    a.triangularView<Eigen::StrictlyUpper>() = a.transpose();
    users->col(i) = SolveSpd(a, b, "user", i);
  }
}

// Every antidote user rates every item, so all of them share one system matrix.
void SolveAntidoteUsers(const AntidoteMatrix& antidote, const Eigen::MatrixXd& items,
                        double reg, Eigen::MatrixXd* antidote_users) {
  if (antidote.num_users() == 0) return;
  Eigen::MatrixXd a = items * items.transpose();
  a.diagonal().array() += reg;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("singular normal equations for antidote users");
  }
  Eigen::MatrixXd rhs = items * antidote.values().transpose();
  *antidote_users = llt.solve(rhs);
}

Eigen::MatrixXd ItemSystem(const RatingDataset& train, const Eigen::MatrixXd& users,
                           const Eigen::MatrixXd& antidote_gram, double reg, int item) {
  Eigen::MatrixXd s = antidote_gram;
  s.diagonal().array() += reg;
  for (const Rating& r : train.item_ratings(item)) {
    s.selfadjointView<Eigen::Lower>().rankUpdate(users.col(r.user));
  }
  s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
  return s;
}

Eigen::VectorXd ItemRhs(const RatingDataset& train, const AntidoteMatrix& antidote,
                        const FactorModel& model, int item) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(model.rank);
  for (const Rating& r : train.item_ratings(item)) {
    b.noalias() += r.value * model.users.col(r.user);
  }
  if (antidote.num_users() > 0) {
    b.noalias() += model.antidote_users * antidote.values().col(item);
  }
  return b;
}

void SolveItems(const RatingDataset& train, const AntidoteMatrix& antidote,
                FactorModel* model) {
  Eigen::MatrixXd antidote_gram =
      model->antidote_users * model->antidote_users.transpose();
  for (int j = 0; j < train.num_items(); ++j) {
    if (train.item_count(j) == 0 && antidote.num_users() == 0 && model->reg > 0.0) {
      model->items.col(j).setZero();
      continue;
    }
    Eigen::MatrixXd s = ItemSystem(train, model->users, antidote_gram, model->reg, j);
    model->items.col(j) = SolveSpd(s, ItemRhs(train, antidote, *model, j), "item", j);
  }
}

void CheckProblem(const RatingDataset& train, const AntidoteMatrix& antidote, int rank,
                  double reg) {
  if (rank < 1) throw ArgumentError("rank must be at least 1");
  if (!(reg >= 0.0) || !std::isfinite(reg)) {
    throw ArgumentError("regularization must be finite and non-negative");
  }
  if (antidote.num_users() > 0 && antidote.num_items() != train.num_items()) {
    throw ValidationError("antidote has " + std::to_string(antidote.num_items()) +
                          " columns, dataset has " + std::to_string(train.num_items()) +
                          " items");
  }
}

void InitializeFactors(const RatingDataset& train, const AntidoteMatrix& antidote,
                       int rank, const AlsOptions& opts, FactorModel* model) {
  const int n = train.num_users();
  const int d = train.num_items();
  const int n_antidote = antidote.num_users();
  double scale = opts.init_scale > 0.0 ? opts.init_scale : 1.0 / std::sqrt(rank);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uniform(0.0, scale);
  auto fill = [&](Eigen::MatrixXd* m) {
    for (Eigen::Index k = 0; k < m->size(); ++k) m->data()[k] = uniform(rng);
  };
  model->users.resize(rank, n);
  model->items.resize(rank, d);
  model->antidote_users.resize(rank, n_antidote);
  fill(&model->users);
  fill(&model->items);
  fill(&model->antidote_users);

  if (opts.warm_start) {
    const FactorModel& warm = *opts.warm_start;
    if (warm.rank == rank && warm.num_users() == n && warm.num_items() == d) {
      model->users = warm.users;
      model->items = warm.items;
      if (warm.num_antidote_users() == n_antidote) {
        model->antidote_users = warm.antidote_users;
      }
    }
  }
}

}  // namespace

void FactorModel::Validate() const {
  if (rank < 1) throw ValidationError("factor model rank must be at least 1");
  if (!(reg >= 0.0)) throw ValidationError("factor model reg must be non-negative");
  if (users.rows() != rank || items.rows() != rank ||
      (antidote_users.cols() > 0 && antidote_users.rows() != rank)) {
    throw ValidationError("factor matrices must all have rank rows");
  }
  if (!users.allFinite() || !items.allFinite() || !antidote_users.allFinite()) {
    throw ValidationError("factor model has non-finite entries");
  }
}

void AlsOptions::Validate() const {
  if (max_sweeps < 1) throw ConfigError("ALS max_sweeps must be at least 1");
  if (!(objective_tol > 0.0)) throw ConfigError("ALS objective_tol must be positive");
}

double FactorizationObjective(const RatingDataset& train, const AntidoteMatrix& antidote,
                              const FactorModel& model) {
  double loss = 0.0;
  for (const Rating& r : train.entries()) {
    double e = r.value - model.users.col(r.user).dot(model.items.col(r.item));
    loss += e * e;
  }
  if (antidote.num_users() > 0) {
    loss += (antidote.values() - model.antidote_users.transpose() * model.items)
                .squaredNorm();
  }
  return loss + model.reg * (model.users.squaredNorm() +
                             model.antidote_users.squaredNorm() +
                             model.items.squaredNorm());
}

double FactorizationObjective(const RatingDataset& train, const FactorModel& model) {
  return FactorizationObjective(train, AntidoteMatrix::Empty(train.num_items(),
                                                             train.bounds()),
                                model);
}

FactorModel AlsFactorizeJoint(const RatingDataset& train, const AntidoteMatrix& antidote,
                              int rank, double reg, const AlsOptions& opts,
                              AlsTrace* trace) {
  CheckProblem(train, antidote, rank, reg);
  opts.Validate();
  FactorModel model;
  model.rank = rank;
  model.reg = reg;
  InitializeFactors(train, antidote, rank, opts, &model);

  AlsTrace local;
  AlsTrace& t = trace ? *trace : local;
  t = AlsTrace{};
  double previous = FactorizationObjective(train, antidote, model);
  t.objective.push_back(previous);
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    SolveUsers(train, model.items, reg, &model.users);
    SolveAntidoteUsers(antidote, model.items, reg, &model.antidote_users);
    t.objective.push_back(FactorizationObjective(train, antidote, model));
    SolveItems(train, antidote, &model);
    double current = FactorizationObjective(train, antidote, model);
    t.objective.push_back(current);
    t.sweeps = sweep + 1;
    if (!std::isfinite(current)) throw NumericalError("ALS objective became non-finite");
    double denom = std::max(std::abs(previous), std::numeric_limits<double>::min());
    if (std::abs(previous - current) / denom < opts.objective_tol) break;
    previous = current;
  }
  return model;
}

FactorModel AlsFactorize(const RatingDataset& train, int rank, double reg,
                         const AlsOptions& opts, AlsTrace* trace) {
  return AlsFactorizeJoint(train, AntidoteMatrix::Empty(train.num_items(), train.bounds()),
                           rank, reg, opts, trace);
}

Eigen::VectorXd SolveItemFactor(const RatingDataset& train, const AntidoteMatrix& antidote,
                                const FactorModel& model, int item) {
  Eigen::MatrixXd antidote_gram = model.antidote_users * model.antidote_users.transpose();
  Eigen::MatrixXd s = ItemSystem(train, model.users, antidote_gram, model.reg, item);
  return SolveSpd(s, ItemRhs(train, antidote, model, item), "item", item);
}

Eigen::MatrixXd Predict(const FactorModel& model) {
  return model.users.transpose() * model.items;
}

std::vector<ValidationCell> ValidationRmseGrid(const RatingDataset& dataset,
                                               const std::vector<int>& ranks,
                                               const std::vector<double>& regs,
                                               int splits, double fraction,
                                               uint64_t seed, const AlsOptions& opts) {
  if (splits < 1) throw ArgumentError("validation needs at least one split");
  std::vector<ValidationCell> cells;
  for (int rank : ranks) {
    for (double reg : regs) cells.push_back({rank, reg, 0.0});
  }
  for (int s = 0; s < splits; ++s) {
    SplitPair split = HoldoutSplit(dataset, fraction, seed + s);
    AlsOptions split_opts = opts;
    split_opts.seed = opts.seed + s;
    split_opts.warm_start.reset();
    for (ValidationCell& cell : cells) {
      FactorModel model = AlsFactorize(split.train, cell.rank, cell.reg, split_opts);
      cell.mean_rmse += Rmse(split.test, Predict(model)) / splits;
    }
  }
  return cells;
}

void WriteFactorModel(const FactorModel& model, std::ostream& out) {
  model.Validate();
  std::ostringstream text;
  text.precision(17);
  text << "factor_model v1\n";
  text << "rank,users,items,antidote_users,reg\n";
  text << model.rank << ',' << model.num_users() << ',' << model.num_items() << ','
       << model.num_antidote_users() << ',' << model.reg << '\n';
  auto write = [&](const Eigen::MatrixXd& m) {
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c > 0) text << ',';
        text << m(k, c);
      }
      text << '\n';
    }
  };
  write(model.users);
  write(model.items);
  if (model.num_antidote_users() > 0) write(model.antidote_users);
  out << text.str();
}

FactorModel ReadFactorModel(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "factor_model v1") {
    throw ParseError("factor model file must start with 'factor_model v1'");
  }
  if (!std::getline(in, line) || line != "rank,users,items,antidote_users,reg") {
    throw ParseError("factor model header line missing");
  }
  FactorModel model;
  long n = 0, d = 0, n_antidote = 0;
  char c1, c2, c3, c4;
  if (!std::getline(in, line)) throw ParseError("factor model dimensions missing");
  std::istringstream dims(line);
  if (!(dims >> model.rank >> c1 >> n >> c2 >> d >> c3 >> n_antidote >> c4 >> model.reg) ||
      c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || model.rank < 1 || n < 0 ||
      d < 0 || n_antidote < 0) {
    throw ParseError("malformed factor model dimensions line");
  }
  int line_no = 3;
  auto read = [&](Eigen::Index cols) {
    Eigen::MatrixXd m(model.rank, cols);
    if (cols == 0) return m;
    for (int k = 0; k < model.rank; ++k) {
      ++line_no;
      if (!std::getline(in, line)) {
        throw ParseError("factor model truncated at line " + std::to_string(line_no));
      }
      std::istringstream row(line);
      for (Eigen::Index c = 0; c < cols; ++c) {
        char sep = ',';
        if ((c > 0 && !(row >> sep)) || sep != ',' || !(row >> m(k, c))) {
          throw ParseError("malformed factor model line " + std::to_string(line_no));
        }
      }
      std::string rest;
      if (row >> rest) {
        throw ParseError("too many values on factor model line " +
                         std::to_string(line_no));
      }
    }
    return m;
  };
  model.users = read(n);
  model.items = read(d);
  model.antidote_users = read(n_antidote);
  model.Validate();
  return model;
}

}  // namespace antidote
