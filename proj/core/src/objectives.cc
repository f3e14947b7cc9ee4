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

#include "antidote/objectives.h"

#include <numeric>

#include "antidote/error.h"

namespace antidote {
namespace {

void CheckShape(const RatingDataset& data, const Eigen::MatrixXd& predictions) {
  if (predictions.rows() != data.num_users() || predictions.cols() != data.num_items()) {
    throw ArgumentError("prediction matrix is " + std::to_string(predictions.rows()) +
                        "x" + std::to_string(predictions.cols()) + ", dataset is " +
                        std::to_string(data.num_users()) + "x" +
                        std::to_string(data.num_items()));
  }
}

const GroupAssignment& RequireGroups(const ObjectiveSpec& spec) {
  if (!spec.groups) throw ConfigError("group fairness requires a group assignment");
  return *spec.groups;
}

}  // namespace

const char* ObjectiveKindName(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::kPolarization:
      return "polarization";
    case ObjectiveKind::kIndividualFairness:
      return "individual_fairness";
    case ObjectiveKind::kGroupFairness:
      return "group_fairness";
  }
  return "?";
}

ObjectiveKind ParseObjectiveKind(const std::string& name) {
  if (name == "polarization") return ObjectiveKind::kPolarization;
  if (name == "individual_fairness") return ObjectiveKind::kIndividualFairness;
  if (name == "group_fairness") return ObjectiveKind::kGroupFairness;
  throw ConfigError("unknown objective '" + name + "'");
}

const char* DirectionName(Direction direction) {
  return direction == Direction::kMinimize ? "minimize" : "maximize";
}

Direction ParseDirection(const std::string& name) {
  if (name == "minimize") return Direction::kMinimize;
  if (name == "maximize") return Direction::kMaximize;
  throw ConfigError("unknown direction '" + name + "'");
}

void ObjectiveSpec::Validate() const {
  if (kind == ObjectiveKind::kGroupFairness && !groups) {
    throw ConfigError("group fairness requires a group assignment");
  }
  if (kind != ObjectiveKind::kPolarization && direction != Direction::kMinimize) {
    throw ConfigError(std::string(ObjectiveKindName(kind)) + " can only be minimized");
  }
}

double PopulationVariance(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  double sum = 0.0;
  for (double v : values) sum += (v - mean) * (v - mean);
  return sum / values.size();
}

double Polarization(const Eigen::MatrixXd& predictions) {
  if (predictions.rows() < 1) throw ArgumentError("polarization needs at least one user");
  if (predictions.cols() == 0) return 0.0;
  Eigen::RowVectorXd mean = predictions.colwise().mean();
  return (predictions.rowwise() - mean).squaredNorm() /
         (static_cast<double>(predictions.rows()) * predictions.cols());
}

std::vector<double> UserLosses(const RatingDataset& data,
                               const Eigen::MatrixXd& predictions) {
  CheckShape(data, predictions);
  std::vector<double> losses(data.num_users(), 0.0);
  for (int i = 0; i < data.num_users(); ++i) {
    auto row = data.user_ratings(i);
    if (row.empty()) {
      throw ArgumentError("user " + data.user_ids()[i] + " has no known ratings");
    }
    double sum = 0.0;
    for (const Rating& r : row) {
      double e = predictions(r.user, r.item) - r.value;
      sum += e * e;
    }
    losses[i] = sum / row.size();
  }
  return losses;
}

std::vector<double> GroupLosses(const RatingDataset& data,
                                const Eigen::MatrixXd& predictions,
                                const GroupAssignment& groups) {
  CheckShape(data, predictions);
  groups.CheckCompatible(data);
  std::vector<double> sums(groups.num_groups(), 0.0);
  std::vector<long> counts(groups.num_groups(), 0);
  for (const Rating& r : data.entries()) {
    int g = groups.GroupOfEntry(r.user, r.item);
    double e = predictions(r.user, r.item) - r.value;
    sums[g] += e * e;
    ++counts[g];
  }
  for (int g = 0; g < groups.num_groups(); ++g) {
    if (counts[g] == 0) {
      throw ArgumentError("group '" + groups.names()[g] + "' has no known ratings");
    }
    sums[g] /= counts[g];
  }
  return sums;
}

double IndividualUnfairness(const RatingDataset& data,
                            const Eigen::MatrixXd& predictions) {
  return PopulationVariance(UserLosses(data, predictions));
}

double GroupUnfairness(const RatingDataset& data, const Eigen::MatrixXd& predictions,
                       const GroupAssignment& groups) {
  return PopulationVariance(GroupLosses(data, predictions, groups));
}

double EvaluateObjective(const ObjectiveSpec& spec, const RatingDataset& data,
                         const Eigen::MatrixXd& predictions) {
  switch (spec.kind) {
    case ObjectiveKind::kPolarization:
      return Polarization(predictions);
    case ObjectiveKind::kIndividualFairness:
      return IndividualUnfairness(data, predictions);
    case ObjectiveKind::kGroupFairness:
      return GroupUnfairness(data, predictions, RequireGroups(spec));
  }
  return 0.0;
}

Eigen::MatrixXd ObjectiveGradient(const ObjectiveSpec& spec, const RatingDataset& data,
                                  const Eigen::MatrixXd& predictions) {
  const double n = static_cast<double>(predictions.rows());
  const double d = static_cast<double>(predictions.cols());
  switch (spec.kind) {
    case ObjectiveKind::kPolarization: {
      if (predictions.rows() < 1) {
        throw ArgumentError("polarization needs at least one user");
      }
      Eigen::RowVectorXd mean = predictions.colwise().mean();
      return (2.0 / (n * d)) * (predictions.rowwise() - mean);
    }
    case ObjectiveKind::kIndividualFairness: {
      std::vector<double> losses = UserLosses(data, predictions);
      double mean = std::accumulate(losses.begin(), losses.end(), 0.0) / n;
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(predictions.rows(), predictions.cols());
      for (int i = 0; i < data.num_users(); ++i) {
        auto row = data.user_ratings(i);
        double scale = 4.0 * (losses[i] - mean) / (n * row.size());
        for (const Rating& r : row) {
          g(r.user, r.item) = scale * (predictions(r.user, r.item) - r.value);
        }
      }
      return g;
    }
    case ObjectiveKind::kGroupFairness: {
      const GroupAssignment& groups = RequireGroups(spec);
      std::vector<double> losses = GroupLosses(data, predictions, groups);
      const double num_groups = groups.num_groups();
      double mean = std::accumulate(losses.begin(), losses.end(), 0.0) / num_groups;
      std::vector<long> counts(groups.num_groups(), 0);
      for (const Rating& r : data.entries()) ++counts[groups.GroupOfEntry(r.user, r.item)];
      Eigen::MatrixXd g = Eigen::MatrixXd::Zero(predictions.rows(), predictions.cols());
      for (const Rating& r : data.entries()) {
        int k = groups.GroupOfEntry(r.user, r.item);
        g(r.user, r.item) = 4.0 * (predictions(r.user, r.item) - r.value) *
                            (losses[k] - mean) / (num_groups * counts[k]);
      }
      return g;
    }
  }
  return {};
}

}  // namespace antidote
