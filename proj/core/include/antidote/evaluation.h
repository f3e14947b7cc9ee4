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

#ifndef ANTIDOTE_EVALUATION_H_
#define ANTIDOTE_EVALUATION_H_

#include <map>
#include <vector>

#include <Eigen/Core>

#include "antidote/ratings.h"

namespace antidote {

// What to do with a user or group that has no known ratings in scope.
enum class EmptyScope { kError, kNaN };

// Root-mean-square error over all known entries of `data`; 0 if there are none.
double Rmse(const RatingDataset& data, const Eigen::MatrixXd& predictions);

// One RMSE per user over that user's known ratings.
std::vector<double> PerUserRmse(const RatingDataset& data,
                                const Eigen::MatrixXd& predictions,
                                EmptyScope empty = EmptyScope::kError);

// One RMSE per group over the known ratings falling in that group.
std::vector<double> PerGroupRmse(const RatingDataset& data,
                                 const Eigen::MatrixXd& predictions,
                                 const GroupAssignment& groups,
                                 EmptyScope empty = EmptyScope::kError);

// Population variance of every prediction column.
std::vector<double> PerItemVariance(const Eigen::MatrixXd& predictions);

// Mean over users of the Jaccard similarity between the top-k unrated items
// under two prediction matrices. Items rank by predicted rating, descending,
// ties to the smaller index. Throws kArgument naming the first user with fewer
// than max(ks) unrated items.
std::map<int, double> TopKJaccard(const Eigen::MatrixXd& before,
                                  const Eigen::MatrixXd& after,
                                  const RatingDataset& train, const std::vector<int>& ks);

}  // namespace antidote

#endif  // ANTIDOTE_EVALUATION_H_
