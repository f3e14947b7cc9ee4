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

#include "antidote/evaluation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "antidote/error.h"

namespace antidote {
namespace {

void CheckShape(const RatingDataset& data, const Eigen::MatrixXd& predictions) {
  if (predictions.rows() != data.num_users() || predictions.cols() != data.num_items()) {
    throw ArgumentError("prediction matrix shape does not match the dataset");
  }
}

// Sorted indices of the k best unrated items of `user`.
std::vector<int> TopK(const Eigen::MatrixXd& predictions, const std::vector<int>& pool,
                      int user, int k) {
  std::vector<int> order = pool;
  std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
    double pa = predictions(user, a);
    double pb = predictions(user, b);
    return pa != pb ? pa > pb : a < b;
  });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

double Jaccard(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(common));
  size_t union_size = a.size() + b.size() - common.size();
  return union_size == 0 ? 1.0 : static_cast<double>(common.size()) / union_size;
}

}  // namespace

double Rmse(const RatingDataset& data, const Eigen::MatrixXd& predictions) {
  CheckShape(data, predictions);
  if (data.num_entries() == 0) return 0.0;
  double sum = 0.0;
  for (const Rating& r : data.entries()) {
    double e = predictions(r.user, r.item) - r.value;
    sum += e * e;
  }
  return std::sqrt(sum / data.num_entries());
}

std::vector<double> PerUserRmse(const RatingDataset& data,
                                const Eigen::MatrixXd& predictions, EmptyScope empty) {
  CheckShape(data, predictions);
  std::vector<double> out(data.num_users());
  for (int i = 0; i < data.num_users(); ++i) {
    auto row = data.user_ratings(i);
    if (row.empty()) {
      if (empty == EmptyScope::kError) {
        throw ArgumentError("user " + data.user_ids()[i] + " has no known ratings");
      }
      out[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double sum = 0.0;
    for (const Rating& r : row) {
      double e = predictions(r.user, r.item) - r.value;
      sum += e * e;
    }
    out[i] = std::sqrt(sum / row.size());
  }
  return out;
}

std::vector<double> PerGroupRmse(const RatingDataset& data,
                                 const Eigen::MatrixXd& predictions,
                                 const GroupAssignment& groups, EmptyScope empty) {
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
      if (empty == EmptyScope::kError) {
        throw ArgumentError("group '" + groups.names()[g] + "' has no known ratings");
      }
      sums[g] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    sums[g] = std::sqrt(sums[g] / counts[g]);
  }
  return sums;
}

std::vector<double> PerItemVariance(const Eigen::MatrixXd& predictions) {
  if (predictions.rows() < 1) throw ArgumentError("per-item variance needs a user");
  Eigen::RowVectorXd mean = predictions.colwise().mean();
  Eigen::RowVectorXd var =
      (predictions.rowwise() - mean).colwise().squaredNorm() / predictions.rows();
  return std::vector<double>(var.data(), var.data() + var.size());
}

std::map<int, double> TopKJaccard(const Eigen::MatrixXd& before,
                                  const Eigen::MatrixXd& after,
                                  const RatingDataset& train, const std::vector<int>& ks) {
  CheckShape(train, before);
  CheckShape(train, after);
  std::map<int, double> result;
  if (ks.empty()) return result;
  int max_k = *std::max_element(ks.begin(), ks.end());
  if (*std::min_element(ks.begin(), ks.end()) < 1) {
    throw ArgumentError("top-k cutoffs must be positive");
  }
  for (int k : ks) result[k] = 0.0;
  if (train.num_users() == 0) return result;

  std::vector<int> pool;
  for (int i = 0; i < train.num_users(); ++i) {
    pool.clear();
    auto row = train.user_ratings(i);
    auto known = row.begin();
    for (int j = 0; j < train.num_items(); ++j) {
      if (known != row.end() && known->item == j) {
        ++known;
        continue;
      }
      pool.push_back(j);
    }
    if (static_cast<int>(pool.size()) < max_k) {
      throw ArgumentError("user " + train.user_ids()[i] + " has only " +
                          std::to_string(pool.size()) + " unrated items, k = " +
                          std::to_string(max_k));
    }
    for (int k : ks) {
      result[k] += Jaccard(TopK(before, pool, i, k), TopK(after, pool, i, k));
    }
  }
  for (auto& [k, sum] : result) sum /= train.num_users();
  return result;
}

}  // namespace antidote
