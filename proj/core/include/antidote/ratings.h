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

#ifndef ANTIDOTE_RATINGS_H_
#define ANTIDOTE_RATINGS_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace antidote {

struct RatingBounds {
  double min = 0.0;
  double max = 5.0;

  bool Contains(double v) const { return v >= min && v <= max; }
  double Clamp(double v) const { return v < min ? min : (v > max ? max : v); }
  friend bool operator==(const RatingBounds&, const RatingBounds&) = default;
};

struct Rating {
  int user = 0;
  int item = 0;
  double value = 0.0;

  friend bool operator==(const Rating&, const Rating&) = default;
};

// A partially observed n x d rating matrix.
//
// Entries are stored sorted by (user, item). Two index views are built at
// construction: the per-user rows (the known items of user i) and the
// per-item columns (the known users of item j). Both views reference the
// same set of entries, so membership in one implies membership in the other.
//
// Instances are immutable after construction.
class RatingDataset {
 public:
  RatingDataset() = default;

  // Validates the invariants: indices in range, ratings within `bounds`, no
  // duplicate (user, item) pairs, id vectors sized n and d. Throws Error with
  // kValidation on violation.
  RatingDataset(int num_users, int num_items, std::vector<Rating> entries,
                std::vector<std::string> user_ids,
                std::vector<std::string> item_ids, RatingBounds bounds);

  // Same as above with ids "0".."n-1" and "0".."d-1".
  static RatingDataset FromEntries(int num_users, int num_items,
                                   std::vector<Rating> entries,
                                   RatingBounds bounds = {});

  int num_users() const { return num_users_; }
  int num_items() const { return num_items_; }
  int64_t num_entries() const { return static_cast<int64_t>(entries_.size()); }
  const RatingBounds& bounds() const { return bounds_; }
  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::vector<std::string>& item_ids() const { return item_ids_; }

  // All entries, sorted by (user, item).
  std::span<const Rating> entries() const { return entries_; }
  // Known ratings of user i, sorted by item.
  std::span<const Rating> user_ratings(int user) const;
  // Known ratings of item j, sorted by user.
  std::span<const Rating> item_ratings(int item) const;

  int user_count(int user) const {
    return static_cast<int>(user_ratings(user).size());
  }
  int item_count(int item) const {
    return static_cast<int>(item_ratings(item).size());
  }

  bool Contains(int user, int item) const;
  // Fraction of the n*d cells that are known.
  double Density() const;

  friend bool operator==(const RatingDataset& a, const RatingDataset& b) {
    return a.num_users_ == b.num_users_ && a.num_items_ == b.num_items_ &&
           a.entries_ == b.entries_ && a.user_ids_ == b.user_ids_ &&
           a.item_ids_ == b.item_ids_ && a.bounds_ == b.bounds_;
  }

 private:
  int num_users_ = 0;
  int num_items_ = 0;
  std::vector<Rating> entries_;
  std::vector<Rating> by_item_;
  std::vector<int64_t> user_offsets_{0};
  std::vector<int64_t> item_offsets_{0};
  std::vector<std::string> user_ids_;
  std::vector<std::string> item_ids_;
  RatingBounds bounds_;
};

enum class GroupAxis { kUsers, kItems };

// A partition of users or items into labeled groups.
class GroupAssignment {
 public:
  GroupAssignment() = default;

  // `labels[e]` is the group index of entity e; `names[g]` its label. Every
  // group index must be used at least once.
  GroupAssignment(GroupAxis axis, std::vector<int> labels,
                  std::vector<std::string> names);

  // Builds the partition from one text label per entity. Group indices follow
  // first-appearance order.
  static GroupAssignment FromLabels(GroupAxis axis,
                                    const std::vector<std::string>& labels);

  GroupAxis axis() const { return axis_; }
  int num_groups() const { return static_cast<int>(names_.size()); }
  int num_entities() const { return static_cast<int>(labels_.size()); }
  int group_of(int entity) const { return labels_[entity]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::string>& names() const { return names_; }

  // Group of entry (user, item) on this assignment's axis.
  int GroupOfEntry(int user, int item) const {
    return labels_[axis_ == GroupAxis::kUsers ? user : item];
  }

  // Throws kValidation unless the size matches the dataset's axis.
  void CheckCompatible(const RatingDataset& dataset) const;

 private:
  GroupAxis axis_ = GroupAxis::kItems;
  std::vector<int> labels_;
  std::vector<std::string> names_;
};

struct SplitPair {
  RatingDataset train;
  RatingDataset test;
};

enum class GenrePolicy { kFirstListed };
enum class UserFilterMode { kRandomSubset, kMostActive };

// Parses `UserID<sep>MovieID<sep>Rating<sep>Timestamp` lines. Ids are
// re-indexed densely in first-appearance order; bounds are (0, 5) unless
// overridden.
RatingDataset LoadMovieLens(std::istream& in, const std::string& separator = "::",
                            RatingBounds bounds = {});

// Generic CSV with header `user_id,item_id,rating`.
RatingDataset LoadRatingsCsv(std::istream& in, RatingBounds bounds = {});
void WriteRatingsCsv(const RatingDataset& dataset, std::ostream& out);

// Parses `MovieID::Title::Genres` lines and labels every item of `dataset`.
GroupAssignment LoadGenreGroups(std::istream& movies, const RatingDataset& dataset,
                                GenrePolicy policy = GenrePolicy::kFirstListed);

// CSV `entity_id,group_label`, keyed by the dataset's external ids.
GroupAssignment LoadGroupsCsv(std::istream& in, const RatingDataset& dataset,
                              GroupAxis axis);
void WriteGroupsCsv(const GroupAssignment& groups, const RatingDataset& dataset,
                    std::ostream& out);

// Keeps the k most frequently rated items (ties to the smaller index), in
// their original order. Users left without ratings are dropped.
RatingDataset FilterTopItems(const RatingDataset& dataset, int k);

// Keeps k users chosen by `mode`, in their original order. Items left without
// ratings are dropped.
RatingDataset FilterUsers(const RatingDataset& dataset, UserFilterMode mode, int k,
                          uint64_t seed);

// Moves floor(fraction * |ratings of user|) ratings of every user with at
// least two ratings into the test half.
SplitPair HoldoutSplit(const RatingDataset& dataset, double fraction, uint64_t seed);

}  // namespace antidote

#endif  // ANTIDOTE_RATINGS_H_
