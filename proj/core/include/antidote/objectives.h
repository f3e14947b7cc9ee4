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

#ifndef ANTIDOTE_OBJECTIVES_H_
#define ANTIDOTE_OBJECTIVES_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "antidote/ratings.h"

namespace antidote {

enum class ObjectiveKind { kPolarization, kIndividualFairness, kGroupFairness };
enum class Direction { kMinimize, kMaximize };

const char* ObjectiveKindName(ObjectiveKind kind);
ObjectiveKind ParseObjectiveKind(const std::string& name);
const char* DirectionName(Direction direction);
Direction ParseDirection(const std::string& name);

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::kPolarization;
  Direction direction = Direction::kMinimize;
  std::optional<GroupAssignment> groups;

  // Group fairness needs groups; the fairness kinds only minimize.
  void Validate() const;
  bool minimize() const { return direction == Direction::kMinimize; }
};

// Population variance (no Bessel correction).
double PopulationVariance(std::span<const double> values);

// Mean over items of the population variance of each prediction column.
// Equal to the normalized sum of squared distances between prediction rows.
double Polarization(const Eigen::MatrixXd& predictions);

// Mean squared error over the known ratings of every user. Throws kArgument
// for a user without ratings.
std::vector<double> UserLosses(const RatingDataset& data,
                               const Eigen::MatrixXd& predictions);

// Mean squared error over the known ratings of every group. Throws kArgument
// naming an empty group.
std::vector<double> GroupLosses(const RatingDataset& data,
                                const Eigen::MatrixXd& predictions,
                                const GroupAssignment& groups);

// Variance of the per-user losses.
double IndividualUnfairness(const RatingDataset& data,
                            const Eigen::MatrixXd& predictions);

// Variance of the per-group losses.
double GroupUnfairness(const RatingDataset& data, const Eigen::MatrixXd& predictions,
                       const GroupAssignment& groups);

// Value of `spec`'s objective. `data` supplies the known ratings for the
// fairness kinds and is ignored for polarization.
double EvaluateObjective(const ObjectiveSpec& spec, const RatingDataset& data,
                         const Eigen::MatrixXd& predictions);

// n x d matrix of partial derivatives of the objective with respect to each
// prediction. For the fairness kinds entries off the known set are zero.
Eigen::MatrixXd ObjectiveGradient(const ObjectiveSpec& spec, const RatingDataset& data,
                                  const Eigen::MatrixXd& predictions);

}  // namespace antidote

#endif  // ANTIDOTE_OBJECTIVES_H_
