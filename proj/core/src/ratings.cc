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

#include "antidote/ratings.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "antidote/error.h"

namespace antidote {
namespace {

std::vector<std::string_view> Split(std::string_view line, std::string_view sep) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + sep.size();
  }
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool ParseDouble(std::string_view s, double* out) {
  s = Trim(s);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(*out);
}

// Maps external ids to dense indices in first-appearance order.
class IdIndex {
 public:
  int Intern(std::string_view id) {
    auto [it, inserted] = index_.try_emplace(std::string(id), size());
    if (inserted) ids_.emplace_back(id);
    return it->second;
  }
  int size() const { return static_cast<int>(ids_.size()); }
  std::vector<std::string> Release() { return std::move(ids_); }

 private:
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> ids_;
};

std::string PairName(const std::vector<std::string>& user_ids,
                     const std::vector<std::string>& item_ids, const Rating& r) {
  return "(user " + user_ids[r.user] + ", item " + item_ids[r.item] + ")";
}

RatingDataset BuildFromText(IdIndex& users, IdIndex& items, std::vector<Rating> entries,
                            RatingBounds bounds) {
  int n = users.size();
  int d = items.size();
  return RatingDataset(n, d, std::move(entries), users.Release(), items.Release(),
                       bounds);
}

// Restricts to the marked users and items, compacting indices, and keeps the
// original relative order of both.
RatingDataset Restrict(const RatingDataset& dataset, const std::vector<bool>& keep_user,
                       const std::vector<bool>& keep_item) {
  std::vector<int> user_map(dataset.num_users(), -1);
  std::vector<int> item_map(dataset.num_items(), -1);
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  for (int i = 0; i < dataset.num_users(); ++i) {
    if (keep_user[i]) {
      user_map[i] = static_cast<int>(user_ids.size());
      user_ids.push_back(dataset.user_ids()[i]);
    }
  }
  for (int j = 0; j < dataset.num_items(); ++j) {
    if (keep_item[j]) {
      item_map[j] = static_cast<int>(item_ids.size());
      item_ids.push_back(dataset.item_ids()[j]);
    }
  }
  std::vector<Rating> entries;
  for (const Rating& r : dataset.entries()) {
    if (user_map[r.user] >= 0 && item_map[r.item] >= 0) {
      entries.push_back({user_map[r.user], item_map[r.item], r.value});
    }
  }
  int n = static_cast<int>(user_ids.size());
  int d = static_cast<int>(item_ids.size());
  return RatingDataset(n, d, std::move(entries), std::move(user_ids),
                       std::move(item_ids), dataset.bounds());
}

// Indices of the k largest counts; ties go to the smaller index.
std::vector<bool> TopByCount(const std::vector<int>& counts, int k) {
  std::vector<int> order(counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return counts[a] > counts[b]; });
  std::vector<bool> keep(counts.size(), false);
  for (int r = 0; r < k; ++r) keep[order[r]] = true;
  return keep;
}

}  // namespace

RatingDataset::RatingDataset(int num_users, int num_items, std::vector<Rating> entries,
                             std::vector<std::string> user_ids,
                             std::vector<std::string> item_ids, RatingBounds bounds)
    : num_users_(num_users),
      num_items_(num_items),
      entries_(std::move(entries)),
      user_ids_(std::move(user_ids)),
      item_ids_(std::move(item_ids)),
      bounds_(bounds) {
  if (num_users_ < 0 || num_items_ < 0) {
    throw ValidationError("negative dataset dimensions");
  }
  if (static_cast<int>(user_ids_.size()) != num_users_ ||
      static_cast<int>(item_ids_.size()) != num_items_) {
    throw ValidationError("id vectors do not match dataset dimensions");
  }
  if (!(bounds_.min < bounds_.max)) {
    throw ValidationError("rating bounds must satisfy min < max");
  }
  for (const Rating& r : entries_) {
    if (r.user < 0 || r.user >= num_users_ || r.item < 0 || r.item >= num_items_) {
      throw ValidationError("rating index out of range: (" + std::to_string(r.user) +
                            ", " + std::to_string(r.item) + ")");
    }
    if (!std::isfinite(r.value) || !bounds_.Contains(r.value)) {
      std::ostringstream msg;
      msg << "rating " << r.value << " outside [" << bounds_.min << ", "
          << bounds_.max << "] at " << PairName(user_ids_, item_ids_, r);
      throw ValidationError(msg.str());
    }
  }
  std::sort(entries_.begin(), entries_.end(), [](const Rating& a, const Rating& b) {
    return a.user != b.user ? a.user < b.user : a.item < b.item;
  });
  for (size_t k = 1; k < entries_.size(); ++k) {
    if (entries_[k].user == entries_[k - 1].user &&
        entries_[k].item == entries_[k - 1].item) {
      throw ValidationError("duplicate rating for " +
                            PairName(user_ids_, item_ids_, entries_[k]));
    }
  }

  user_offsets_.assign(num_users_ + 1, 0);
  item_offsets_.assign(num_items_ + 1, 0);
  for (const Rating& r : entries_) {
    ++user_offsets_[r.user + 1];
    ++item_offsets_[r.item + 1];
  }
  std::partial_sum(user_offsets_.begin(), user_offsets_.end(), user_offsets_.begin());
  std::partial_sum(item_offsets_.begin(), item_offsets_.end(), item_offsets_.begin());
  // Entries are user-major, so a stable placement keeps each column sorted by user.
  by_item_.resize(entries_.size());
  std::vector<int64_t> cursor(item_offsets_.begin(), item_offsets_.end() - 1);
  for (const Rating& r : entries_) by_item_[cursor[r.item]++] = r;
}

RatingDataset RatingDataset::FromEntries(int num_users, int num_items,
                                         std::vector<Rating> entries,
                                         RatingBounds bounds) {
  std::vector<std::string> user_ids(std::max(num_users, 0));
  std::vector<std::string> item_ids(std::max(num_items, 0));
  for (size_t i = 0; i < user_ids.size(); ++i) user_ids[i] = std::to_string(i);
  for (size_t j = 0; j < item_ids.size(); ++j) item_ids[j] = std::to_string(j);
  return RatingDataset(num_users, num_items, std::move(entries), std::move(user_ids),
                       std::move(item_ids), bounds);
}

std::span<const Rating> RatingDataset::user_ratings(int user) const {
  return std::span<const Rating>(entries_).subspan(
      user_offsets_[user], user_offsets_[user + 1] - user_offsets_[user]);
}

std::span<const Rating> RatingDataset::item_ratings(int item) const {
  return std::span<const Rating>(by_item_).subspan(
      item_offsets_[item], item_offsets_[item + 1] - item_offsets_[item]);
}

bool RatingDataset::Contains(int user, int item) const {
  auto row = user_ratings(user);
  auto it = std::lower_bound(row.begin(), row.end(), item,
                             [](const Rating& r, int j) { return r.item < j; });
  return it != row.end() && it->item == item;
}

double RatingDataset::Density() const {
  if (num_users_ == 0 || num_items_ == 0) return 0.0;
  return static_cast<double>(entries_.size()) /
         (static_cast<double>(num_users_) * num_items_);
}

GroupAssignment::GroupAssignment(GroupAxis axis, std::vector<int> labels,
                                 std::vector<std::string> names)
    : axis_(axis), labels_(std::move(labels)), names_(std::move(names)) {
  std::vector<int> counts(names_.size(), 0);
  for (int label : labels_) {
    if (label < 0 || label >= num_groups()) {
      throw ValidationError("group label " + std::to_string(label) + " out of range");
    }
    ++counts[label];
  }
  for (int g = 0; g < num_groups(); ++g) {
    if (counts[g] == 0) throw ValidationError("group '" + names_[g] + "' is empty");
  }
}

GroupAssignment GroupAssignment::FromLabels(GroupAxis axis,
                                            const std::vector<std::string>& labels) {
  IdIndex index;
  std::vector<int> ids;
  ids.reserve(labels.size());
  for (const auto& label : labels) ids.push_back(index.Intern(label));
  return GroupAssignment(axis, std::move(ids), index.Release());
}

void GroupAssignment::CheckCompatible(const RatingDataset& dataset) const {
  int expected =
      axis_ == GroupAxis::kUsers ? dataset.num_users() : dataset.num_items();
  if (num_entities() != expected) {
    throw ValidationError("group assignment covers " + std::to_string(num_entities()) +
                          " entities, dataset axis has " + std::to_string(expected));
  }
}

RatingDataset LoadMovieLens(std::istream& in, const std::string& separator,
                            RatingBounds bounds) {
  IdIndex users;
  IdIndex items;
  std::vector<Rating> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = Trim(line);
    if (view.empty()) continue;
    auto fields = Split(view, separator);
    double value = 0.0;
    if (fields.size() != 4 || Trim(fields[0]).empty() || Trim(fields[1]).empty() ||
        !ParseDouble(fields[2], &value)) {
      throw ParseError("malformed ratings line " + std::to_string(line_no));
    }
    if (!bounds.Contains(value)) {
      std::ostringstream msg;
      msg << "rating " << value << " outside [" << bounds.min << ", " << bounds.max
          << "] on line " << line_no;
      throw ValidationError(msg.str());
    }
    int u = users.Intern(Trim(fields[0]));
    int j = items.Intern(Trim(fields[1]));
    entries.push_back({u, j, value});
  }
  return BuildFromText(users, items, std::move(entries), bounds);
}

RatingDataset LoadRatingsCsv(std::istream& in, RatingBounds bounds) {
  std::string line;
  if (!std::getline(in, line) || Trim(line) != "user_id,item_id,rating") {
    throw ParseError("ratings CSV must start with header 'user_id,item_id,rating'");
  }
  IdIndex users;
  IdIndex items;
  std::vector<Rating> entries;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = Trim(line);
    if (view.empty()) continue;
    auto fields = Split(view, ",");
    double value = 0.0;
    if (fields.size() != 3 || Trim(fields[0]).empty() || Trim(fields[1]).empty() ||
        !ParseDouble(fields[2], &value)) {
      throw ParseError("malformed ratings CSV line " + std::to_string(line_no));
    }
    if (!bounds.Contains(value)) {
      std::ostringstream msg;
      msg << "rating " << value << " outside [" << bounds.min << ", " << bounds.max
          << "] on line " << line_no;
      throw ValidationError(msg.str());
    }
    entries.push_back({users.Intern(Trim(fields[0])), items.Intern(Trim(fields[1])),
                       value});
  }
  return BuildFromText(users, items, std::move(entries), bounds);
}

void WriteRatingsCsv(const RatingDataset& dataset, std::ostream& out) {
  out << "user_id,item_id,rating\n";
  std::ostringstream line;
  line.precision(17);
  for (const Rating& r : dataset.entries()) {
    line.str("");
    line << dataset.user_ids()[r.user] << ',' << dataset.item_ids()[r.item] << ','
         << r.value << '\n';
    out << line.str();
  }
}

GroupAssignment LoadGenreGroups(std::istream& movies, const RatingDataset& dataset,
                                GenrePolicy policy) {
  std::unordered_map<std::string, std::string> genre_of;
  std::string line;
  int line_no = 0;
  while (std::getline(movies, line)) {
    ++line_no;
    std::string_view view = Trim(line);
    if (view.empty()) continue;
    // Titles may contain "::" only in principle; the genre list is the last field.
    size_t first = view.find("::");
    size_t last = view.rfind("::");
    if (first == std::string_view::npos || first == last) {
      throw ParseError("malformed movies line " + std::to_string(line_no));
    }
    std::string_view id = Trim(view.substr(0, first));
    std::string_view genres = Trim(view.substr(last + 2));
    std::string_view label;
    switch (policy) {
      case GenrePolicy::kFirstListed:
        label = Trim(genres.substr(0, genres.find('|')));
        break;
    }
    if (id.empty() || label.empty()) {
      throw ParseError("malformed movies line " + std::to_string(line_no));
    }
    genre_of.emplace(std::string(id), std::string(label));
  }
  std::vector<std::string> labels;
  labels.reserve(dataset.num_items());
  for (const std::string& id : dataset.item_ids()) {
    auto it = genre_of.find(id);
    if (it == genre_of.end()) throw LookupError("item id " + id + " not in movies file");
    labels.push_back(it->second);
  }
  return GroupAssignment::FromLabels(GroupAxis::kItems, labels);
}

GroupAssignment LoadGroupsCsv(std::istream& in, const RatingDataset& dataset,
                              GroupAxis axis) {
  std::string line;
  if (!std::getline(in, line) || Trim(line) != "entity_id,group_label") {
    throw ParseError("group CSV must start with header 'entity_id,group_label'");
  }
  std::unordered_map<std::string, std::string> label_of;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = Trim(line);
    if (view.empty()) continue;
    auto fields = Split(view, ",");
    if (fields.size() != 2 || Trim(fields[0]).empty() || Trim(fields[1]).empty()) {
      throw ParseError("malformed group CSV line " + std::to_string(line_no));
    }
    label_of.emplace(std::string(Trim(fields[0])), std::string(Trim(fields[1])));
  }
  const auto& ids = axis == GroupAxis::kUsers ? dataset.user_ids() : dataset.item_ids();
  std::vector<std::string> labels;
  labels.reserve(ids.size());
  for (const std::string& id : ids) {
    auto it = label_of.find(id);
    if (it == label_of.end()) throw LookupError("entity id " + id + " has no group");
    labels.push_back(it->second);
  }
  return GroupAssignment::FromLabels(axis, labels);
}

void WriteGroupsCsv(const GroupAssignment& groups, const RatingDataset& dataset,
                    std::ostream& out) {
  groups.CheckCompatible(dataset);
  const auto& ids =
      groups.axis() == GroupAxis::kUsers ? dataset.user_ids() : dataset.item_ids();
  out << "entity_id,group_label\n";
  for (int e = 0; e < groups.num_entities(); ++e) {
    out << ids[e] << ',' << groups.names()[groups.group_of(e)] << '\n';
  }
}

RatingDataset FilterTopItems(const RatingDataset& dataset, int k) {
  if (k <= 0) throw ArgumentError("filter_top_items: k must be positive");
  if (k > dataset.num_items()) {
    throw ArgumentError("filter_top_items: k exceeds item count " +
                        std::to_string(dataset.num_items()));
  }
  std::vector<int> counts(dataset.num_items());
  for (int j = 0; j < dataset.num_items(); ++j) counts[j] = dataset.item_count(j);
  std::vector<bool> keep_item = TopByCount(counts, k);
  std::vector<bool> keep_user(dataset.num_users(), false);
  for (const Rating& r : dataset.entries()) {
    if (keep_item[r.item]) keep_user[r.user] = true;
  }
  return Restrict(dataset, keep_user, keep_item);
}

RatingDataset FilterUsers(const RatingDataset& dataset, UserFilterMode mode, int k,
                          uint64_t seed) {
  if (k <= 0) throw ArgumentError("filter_users: k must be positive");
  if (k > dataset.num_users()) {
    throw ArgumentError("filter_users: k exceeds user count " +
                        std::to_string(dataset.num_users()));
  }
  std::vector<bool> keep_user;
  if (mode == UserFilterMode::kMostActive) {
    std::vector<int> counts(dataset.num_users());
    for (int i = 0; i < dataset.num_users(); ++i) counts[i] = dataset.user_count(i);
    keep_user = TopByCount(counts, k);
  } else {
    std::vector<int> order(dataset.num_users());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    keep_user.assign(dataset.num_users(), false);
    for (int r = 0; r < k; ++r) keep_user[order[r]] = true;
  }
  std::vector<bool> keep_item(dataset.num_items(), false);
  for (const Rating& r : dataset.entries()) {
    if (keep_user[r.user]) keep_item[r.item] = true;
  }
  return Restrict(dataset, keep_user, keep_item);
}

SplitPair HoldoutSplit(const RatingDataset& dataset, double fraction, uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ArgumentError("holdout fraction must lie in (0, 1)");
  }
  std::mt19937_64 rng(seed);
  std::vector<Rating> train;
  std::vector<Rating> test;
  std::vector<int> order;
  for (int i = 0; i < dataset.num_users(); ++i) {
    auto row = dataset.user_ratings(i);
    int count = static_cast<int>(row.size());
    // The tolerance keeps products such as 0.29 * 100 from flooring to 28.
    int held = count < 2 ? 0 : static_cast<int>(std::floor(fraction * count + 1e-9));
    order.resize(count);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<bool> to_test(count, false);
    for (int r = 0; r < held; ++r) to_test[order[r]] = true;
    for (int r = 0; r < count; ++r) (to_test[r] ? test : train).push_back(row[r]);
  }
  return {RatingDataset(dataset.num_users(), dataset.num_items(), std::move(train),
                        dataset.user_ids(), dataset.item_ids(), dataset.bounds()),
          RatingDataset(dataset.num_users(), dataset.num_items(), std::move(test),
                        dataset.user_ids(), dataset.item_ids(), dataset.bounds())};
}

}  // namespace antidote
