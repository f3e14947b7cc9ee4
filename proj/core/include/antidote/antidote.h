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

#ifndef ANTIDOTE_ANTIDOTE_H_
#define ANTIDOTE_ANTIDOTE_H_

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "antidote/antidote_matrix.h"
#include "antidote/factorization.h"
#include "antidote/objectives.h"
#include "antidote/ratings.h"

namespace antidote {

// Number of antidote users, either absolute or as a fraction of the original
// user count.
class Budget {
 public:
  static Budget Users(int count);
  static Budget Fraction(double fraction);
  // "3" is three users, "0.5%" and "0.005" are fractions.
  static Budget Parse(const std::string& text);

  // max(1, ceil(fraction * num_users)) for fractions.
  int Resolve(int num_users) const;
  bool is_fraction() const { return is_fraction_; }
  std::string ToString() const;

 private:
  bool is_fraction_ = false;
  int count_ = 1;
  double fraction_ = 0.0;
};

enum class StepRule { kBacktracking, kFixed };
enum class InitMode { kFixed, kRandom };

// Options of the projected gradient method. Step sizes are in rating units:
// a step of s moves the entry with the largest partial derivative by s, so a
// step well beyond the rating range pushes most entries onto the bounds.
struct GdOptions {
  int max_iters = 30;
  StepRule step_rule = StepRule::kBacktracking;
  double step = 0.5;  // fixed rule
  double initial_step = 20.0;
  double shrink_factor = 0.5;
  int max_trials = 12;
  double converge_tol = 1e-4;
  InitMode init = InitMode::kRandom;
  // Fixed init value; NaN selects the training mean rating.
  double init_value = std::numeric_limits<double>::quiet_NaN();
  uint64_t seed = 0;
  int restarts = 5;
  // Start every refactorization from the factors of the current iterate.
  bool warm_start_factorization = true;

  void Validate() const;
};

struct OptimizationResult {
  AntidoteMatrix antidote;
  // Joint factors at the returned antidote.
  FactorModel model;
  // Objective after initialization and after every accepted step.
  std::vector<double> trace;
  // Final objective of every restart; `best_restart` indexes the winner.
  std::vector<double> restart_objectives;
  int best_restart = 0;
  // The last line search of the winning run found no improving step.
  bool line_search_exhausted = false;
};

// Partial derivatives of the objective with respect to every antidote rating,
// under the first-order assumption that only v_j responds to x~_ij:
//   dR/dx~_ij = u~_i' S_j^-1 U g_j,  S_j = sum_{i in col j} u_i u_i' + U~U~' + reg I.
// The vectors S_j^-1 U g_j are computed once per item and shared by all rows.
// `gradient` is the n x d objective gradient with respect to the predictions.
Eigen::MatrixXd AntidoteGradient(const FactorModel& model, const RatingDataset& train,
                                 const Eigen::MatrixXd& gradient);

// Projected gradient descent (ascent when maximizing) over the antidote block,
// refactorizing the joint system at every iterate.
OptimizationResult OptimizeAntidote(const RatingDataset& train, const ObjectiveSpec& spec,
                                    const Budget& budget, int rank, double reg,
                                    const GdOptions& gd, const AlsOptions& als);

// One joint factorization with a single row of `init_value` ratings, then
// each item rating is set to the bound opposing the sign of its partial
// derivative (min when positive, max otherwise). The row is replicated to the
// budget.
AntidoteMatrix Heuristic1(const RatingDataset& train, const ObjectiveSpec& spec,
                          const Budget& budget, int rank, double reg,
                          const AlsOptions& als, double init_value);

// Factorization-free variant of Heuristic1: the sign of g_j' U' 1 decides
// each item rating. Only the original user factors are read.
AntidoteMatrix Heuristic2(const FactorModel& model, const Eigen::MatrixXd& gradient,
                          const Budget& budget, const RatingBounds& bounds);

// Every antidote rating of item j is the mean known rating of item j.
AntidoteMatrix BaselineMin(const RatingDataset& train, const Budget& budget);

// The first ceil(n'/2) antidote users rate everything at the maximum, the rest
// at the minimum.
AntidoteMatrix BaselineMax(const RatingDataset& train, const Budget& budget);

// i.i.d. uniform ratings over the bounds.
AntidoteMatrix RandomAntidote(int num_antidote_users, int num_items,
                              const RatingBounds& bounds, uint64_t seed);

// Fraction of items on which two single-row sign patterns agree.
double SignAgreement(const AntidoteMatrix& a, const AntidoteMatrix& b);

}  // namespace antidote

#endif  // ANTIDOTE_ANTIDOTE_H_
