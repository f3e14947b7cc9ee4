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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "antidote/objectives.h"
#include "common/error_matchers.h"
#include "common/oracles.h"
#include "common/synthetic.h"

namespace antidote {
namespace {

using ::antidote::testing::CenteredVariance;
using ::antidote::testing::RandomDataset;

Eigen::MatrixXd RandomPredictions(int rows, int cols, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> value(0.0, 5.0);
  Eigen::MatrixXd x(rows, cols);
  for (int k = 0; k < x.size(); ++k) x.data()[k] = value(rng);
  return x;
}

TEST(RmseTest, PerfectPredictionsGiveZero) {
  auto ds = RandomDataset(6, 5, 0.5, 1);
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(6, 5);
  for (const Rating& r : ds.entries()) x(r.user, r.item) = r.value;
  EXPECT_EQ(Rmse(ds, x), 0.0);
  for (double v : PerUserRmse(ds, x)) EXPECT_EQ(v, 0.0);
}

TEST(RmseTest, SingleEntryWithUnitError) {
  auto ds = RatingDataset::FromEntries(1, 1, {{0, 0, 3.0}});
  EXPECT_DOUBLE_EQ(Rmse(ds, Eigen::MatrixXd::Constant(1, 1, 4.0)), 1.0);
}

TEST(RmseTest, EmptyDatasetGivesZero) {
  auto ds = RatingDataset::FromEntries(2, 2, {});
  EXPECT_EQ(Rmse(ds, Eigen::MatrixXd::Ones(2, 2)), 0.0);
}

TEST(RmseTest, PerUserAndPerGroup) {
  auto ds = RatingDataset::FromEntries(
      2, 2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 2.0}});
  Eigen::MatrixXd x(2, 2);
  x << 2.0, 4.0, 2.0, 0.0;
  auto users = PerUserRmse(ds, x);
  ASSERT_EQ(users.size(), 2u);
  EXPECT_DOUBLE_EQ(users[0], std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(users[1], 0.0);
  GroupAssignment items(GroupAxis::kItems, {0, 1}, {"first", "second"});
  auto groups = PerGroupRmse(ds, x, items);
  EXPECT_DOUBLE_EQ(groups[0], std::sqrt(0.5));
  EXPECT_DOUBLE_EQ(groups[1], 3.0);
}

TEST(RmseTest, EmptyScopeErrorsOrYieldsNaN) {
  auto ds = RatingDataset::FromEntries(2, 1, {{0, 0, 1.0}});
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 1);
  EXPECT_ANTIDOTE_ERROR(PerUserRmse(ds, x), ErrorCode::kArgument);
  auto users = PerUserRmse(ds, x, EmptyScope::kNaN);
  EXPECT_DOUBLE_EQ(users[0], 1.0);
  EXPECT_TRUE(std::isnan(users[1]));
  GroupAssignment by_user(GroupAxis::kUsers, {0, 1}, {"a", "b"});
  EXPECT_ANTIDOTE_ERROR(PerGroupRmse(ds, x, by_user), ErrorCode::kArgument);
}

TEST(RmseTest, IndividualUnfairnessIsVarianceOfSquaredPerUserRmse) {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    auto ds = RandomDataset(20, 12, 0.3, seed);
    Eigen::MatrixXd x = RandomPredictions(20, 12, seed + 50);
    std::vector<double> squared;
    for (double r : PerUserRmse(ds, x)) squared.push_back(r * r);
    EXPECT_NEAR(IndividualUnfairness(ds, x), CenteredVariance(squared), 1e-10);
  }
}

TEST(PerItemVarianceTest, ConstantColumnsAreZero) {
  for (double v : PerItemVariance(Eigen::MatrixXd::Constant(3, 4, 1.5))) EXPECT_EQ(v, 0.0);
}

TEST(PerItemVarianceTest, MeanEqualsPolarization) {
  Eigen::MatrixXd x = RandomPredictions(9, 7, 3);
  auto variances = PerItemVariance(x);
  ASSERT_EQ(variances.size(), 7u);
  double mean = 0.0;
  for (double v : variances) mean += v;
  mean /= variances.size();
  EXPECT_NEAR(mean, Polarization(x), 1e-14);
}

TEST(TopKJaccardTest, IdenticalPredictionsGiveOne) {
  auto ds = RandomDataset(10, 20, 0.2, 1);
  Eigen::MatrixXd x = RandomPredictions(10, 20, 2);
  auto result = TopKJaccard(x, x, ds, {1, 5});
  EXPECT_DOUBLE_EQ(result.at(1), 1.0);
  EXPECT_DOUBLE_EQ(result.at(5), 1.0);
}

TEST(TopKJaccardTest, HandComputedOverlap) {
  // One user who rated item 0; pool is items 1..4.
  auto ds = RatingDataset::FromEntries(1, 5, {{0, 0, 3.0}});
  Eigen::MatrixXd before(1, 5);
  before << 9, 4, 3, 2, 1;
  Eigen::MatrixXd after(1, 5);
  after << 9, 4, 1, 3, 2;
  auto result = TopKJaccard(before, after, ds, {1, 2, 3});
  EXPECT_DOUBLE_EQ(result.at(1), 1.0);        // {1} vs {1}
  EXPECT_DOUBLE_EQ(result.at(2), 1.0 / 3.0);  // {1,2} vs {1,3}
  EXPECT_DOUBLE_EQ(result.at(3), 0.5);        // {1,2,3} vs {1,3,4}
}

TEST(TopKJaccardTest, TiesBreakTowardSmallerIndex) {
  auto ds = RatingDataset::FromEntries(1, 3, {});
  Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(1, 3, 2.0);
  Eigen::MatrixXd last(1, 3);
  last << 2.0, 2.0, 3.0;
  EXPECT_DOUBLE_EQ(TopKJaccard(flat, last, ds, {1}).at(1), 0.0);
  EXPECT_DOUBLE_EQ(TopKJaccard(flat, flat, ds, {2}).at(2), 1.0);
}

TEST(TopKJaccardTest, SymmetricAndWithinUnitInterval) {
  auto ds = RandomDataset(15, 30, 0.2, 4);
  Eigen::MatrixXd a = RandomPredictions(15, 30, 5);
  Eigen::MatrixXd b = RandomPredictions(15, 30, 6);
  auto ab = TopKJaccard(a, b, ds, {1, 5, 10});
  auto ba = TopKJaccard(b, a, ds, {1, 5, 10});
  for (int k : {1, 5, 10}) {
    EXPECT_DOUBLE_EQ(ab.at(k), ba.at(k));
    EXPECT_GE(ab.at(k), 0.0);
    EXPECT_LE(ab.at(k), 1.0);
  }
}

TEST(TopKJaccardTest, RejectsSmallPoolsAndBadCutoffs) {
  auto ds = RatingDataset::FromEntries(1, 3, {{0, 0, 1.0}, {0, 1, 1.0}});
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(1, 3);
  EXPECT_ANTIDOTE_ERROR(TopKJaccard(x, x, ds, {2}), ErrorCode::kArgument);
  EXPECT_ANTIDOTE_ERROR(TopKJaccard(x, x, ds, {0}), ErrorCode::kArgument);
}

}  // namespace
}  // namespace antidote
