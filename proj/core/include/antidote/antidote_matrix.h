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

#ifndef ANTIDOTE_ANTIDOTE_MATRIX_H_
#define ANTIDOTE_ANTIDOTE_MATRIX_H_

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "antidote/ratings.h"

namespace antidote {

// Dense n' x d block of synthetic ratings, every entry inside `bounds`.
class AntidoteMatrix {
 public:
  AntidoteMatrix() = default;
  // Throws kValidation if an entry is non-finite or out of bounds.
  AntidoteMatrix(Eigen::MatrixXd values, RatingBounds bounds);

  // An empty (0 x d) block.
  static AntidoteMatrix Empty(int num_items, RatingBounds bounds);

  int num_users() const { return static_cast<int>(values_.rows()); }
  int num_items() const { return static_cast<int>(values_.cols()); }
  const Eigen::MatrixXd& values() const { return values_; }
  double operator()(int i, int j) const { return values_(i, j); }
  const RatingBounds& bounds() const { return bounds_; }

 private:
  Eigen::MatrixXd values_;
  RatingBounds bounds_;
};

// Entrywise clamp onto [bounds.min, bounds.max].
void ProjectOntoBounds(const RatingBounds& bounds, Eigen::MatrixXd* values);

// CSV rows `antidote_<k>,item_id,rating` using the dataset's item ids. With
// `header` the first line is `user_id,item_id,rating`, making the output a
// ratings CSV on its own; without it the rows can be appended to one.
void WriteAntidoteCsv(const AntidoteMatrix& antidote, const RatingDataset& dataset,
                      std::ostream& out, bool header = true);
void WriteAntidoteCsv(const AntidoteMatrix& antidote,
                      const std::vector<std::string>& item_ids, std::ostream& out,
                      bool header = true);

// Reads the format written above. Every antidote user must rate every item of
// `dataset`; ratings must lie within the dataset's bounds.
AntidoteMatrix LoadAntidoteCsv(std::istream& in, const RatingDataset& dataset);

}  // namespace antidote

#endif  // ANTIDOTE_ANTIDOTE_MATRIX_H_
