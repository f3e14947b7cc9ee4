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

#ifndef ANTIDOTE_FACTORIZATION_H_
#define ANTIDOTE_FACTORIZATION_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "antidote/antidote_matrix.h"
#include "antidote/ratings.h"

namespace antidote {

// Rank-l factors of the regularized factorization. Column i of `users` is the
// latent vector of user i, column j of `items` that of item j, and column k of
// `antidote_users` that of synthetic user k (zero columns when there is none).
struct FactorModel {
  Eigen::MatrixXd users;
  Eigen::MatrixXd items;
  Eigen::MatrixXd antidote_users;
  int rank = 0;
  double reg = 0.0;

  int num_users() const { return static_cast<int>(users.cols()); }
  int num_items() const { return static_cast<int>(items.cols()); }
  int num_antidote_users() const { return static_cast<int>(antidote_users.cols()); }

  // Throws kValidation on mismatched row counts, rank < 1, reg < 0 or a
  // non-finite entry.
  void Validate() const;
};

struct AlsOptions {
  int max_sweeps = 50;
  double objective_tol = 1e-4;
  uint64_t seed = 0;
  // Uniform init range [0, init_scale]; <= 0 selects 1/sqrt(rank).
  double init_scale = 0.0;
  // Used as the initial point when its shapes match the problem.
  std::optional<FactorModel> warm_start;

  void Validate() const;
};

// Objective values recorded while fitting: entry 0 at initialization, then one
// value after every half-sweep (users, then items).
struct AlsTrace {
  std::vector<double> objective;
  int sweeps = 0;
};

// ||P(X - U'V)||^2 + reg * (||U||^2 + ||U~||^2 + ||V||^2); the antidote block
// counts as fully observed.
double FactorizationObjective(const RatingDataset& train, const AntidoteMatrix& antidote,
                              const FactorModel& model);
double FactorizationObjective(const RatingDataset& train, const FactorModel& model);

// Alternating least squares. Each half-sweep solves the exact ridge normal
// equations of every user (resp. item) with the other side fixed. Rows or
// columns without ratings get a zero factor when reg > 0.
FactorModel AlsFactorize(const RatingDataset& train, int rank, double reg,
                         const AlsOptions& opts, AlsTrace* trace = nullptr);

// ALS over the original ratings plus a dense block of antidote users. The
// item equations include the antidote users' factors:
//   (sum_{i in col j} u_i u_i' + U~ U~' + reg I) v_j = sum x_ij u_i + sum x~_kj u~_k.
FactorModel AlsFactorizeJoint(const RatingDataset& train, const AntidoteMatrix& antidote,
                              int rank, double reg, const AlsOptions& opts,
                              AlsTrace* trace = nullptr);

// Ridge solution for item j given fixed user and antidote factors. Used for the
// sensitivity analysis of the item factors.
Eigen::VectorXd SolveItemFactor(const RatingDataset& train, const AntidoteMatrix& antidote,
                                const FactorModel& model, int item);

// n x d dense predictions U'V over the original users only.
Eigen::MatrixXd Predict(const FactorModel& model);

struct ValidationCell {
  int rank = 0;
  double reg = 0.0;
  double mean_rmse = 0.0;
};

// Mean held-out RMSE of every (rank, reg) pair over `splits` holdout draws.
// Split s uses seed + s, so all cells see the same splits.
std::vector<ValidationCell> ValidationRmseGrid(const RatingDataset& dataset,
                                               const std::vector<int>& ranks,
                                               const std::vector<double>& regs,
                                               int splits, double fraction,
                                               uint64_t seed, const AlsOptions& opts);

// Text container: a `factor_model v1` line, a header line
// `rank,users,items,antidote_users,reg`, its values, then the rows of U, V and
// U~, one comma-separated line per latent dimension. Values are written with 17
// significant digits so a round trip is exact.
void WriteFactorModel(const FactorModel& model, std::ostream& out);
FactorModel ReadFactorModel(std::istream& in);

}  // namespace antidote

#endif  // ANTIDOTE_FACTORIZATION_H_
