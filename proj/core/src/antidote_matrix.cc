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

#include "antidote/antidote_matrix.h"

#include <cmath>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "antidote/error.h"

namespace antidote {

AntidoteMatrix::AntidoteMatrix(Eigen::MatrixXd values, RatingBounds bounds)
    : values_(std::move(values)), bounds_(bounds) {
  for (Eigen::Index j = 0; j < values_.cols(); ++j) {
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
      double v = values_(i, j);
      if (!std::isfinite(v) || !bounds_.Contains(v)) {
        std::ostringstream msg;
        msg << "antidote rating " << v << " at (" << i << ", " << j << ") outside ["
            << bounds_.min << ", " << bounds_.max << "]";
        throw ValidationError(msg.str());
      }
    }
  }
}

AntidoteMatrix AntidoteMatrix::Empty(int num_items, RatingBounds bounds) {
  return AntidoteMatrix(Eigen::MatrixXd(0, num_items), bounds);
}

void ProjectOntoBounds(const RatingBounds& bounds, Eigen::MatrixXd* values) {
  *values = values->cwiseMax(bounds.min).cwiseMin(bounds.max);
}

void WriteAntidoteCsv(const AntidoteMatrix& antidote, const RatingDataset& dataset,
                      std::ostream& out, bool header) {
  WriteAntidoteCsv(antidote, dataset.item_ids(), out, header);
}

void WriteAntidoteCsv(const AntidoteMatrix& antidote,
                      const std::vector<std::string>& item_ids, std::ostream& out,
                      bool header) {
  if (antidote.num_items() != static_cast<int>(item_ids.size())) {
    throw ValidationError("antidote has " + std::to_string(antidote.num_items()) +
                          " columns, dataset has " + std::to_string(item_ids.size()) +
                          " items");
  }
  if (header) out << "user_id,item_id,rating\n";
  std::ostringstream line;
  line.precision(17);
  for (int i = 0; i < antidote.num_users(); ++i) {
    for (int j = 0; j < antidote.num_items(); ++j) {
      line.str("");
      line << "antidote_" << i << ',' << item_ids[j] << ',' << antidote(i, j)
           << '\n';
      out << line.str();
    }
  }
}

AntidoteMatrix LoadAntidoteCsv(std::istream& in, const RatingDataset& dataset) {
  // Reuse the generic CSV reader for parsing and bounds checks; ids then map
  // onto the dataset's item columns.
  RatingDataset raw = LoadRatingsCsv(in, dataset.bounds());
  std::unordered_map<std::string, int> column_of;
  for (int j = 0; j < dataset.num_items(); ++j) column_of[dataset.item_ids()[j]] = j;

  Eigen::MatrixXd values(raw.num_users(), dataset.num_items());
  for (int i = 0; i < raw.num_users(); ++i) {
    if (raw.user_count(i) != dataset.num_items()) {
      throw ValidationError("antidote user " + raw.user_ids()[i] + " rates " +
                            std::to_string(raw.user_count(i)) + " items, expected " +
                            std::to_string(dataset.num_items()));
    }
  }
  for (const Rating& r : raw.entries()) {
    auto it = column_of.find(raw.item_ids()[r.item]);
    if (it == column_of.end()) {
      throw ValidationError("antidote item " + raw.item_ids()[r.item] +
                            " is not in the dataset");
    }
    values(r.user, it->second) = r.value;
  }
  return AntidoteMatrix(std::move(values), dataset.bounds());
}

}  // namespace antidote
