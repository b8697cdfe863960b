#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace prevalence {

struct Review {
  std::string id;
  std::string community;
  std::string hotel_id;
  std::string reviewer_id;
  std::int64_t timestamp = 0;  // UTC epoch seconds
  int rating = 0;              // 1..5
  std::string text;
  std::optional<int> label;  // 0 truthful, 1 deceptive, nullopt unlabeled
};

// Immutable after load; insertion order is the iteration order.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::string provenance) : provenance_(std::move(provenance)) {}

  // Validates rating/label ranges and id uniqueness.
  void add(Review r);

  std::size_t size() const { return reviews_.size(); }
  bool empty() const { return reviews_.empty(); }
  const Review& operator[](std::size_t i) const { return reviews_[i]; }
  auto begin() const { return reviews_.begin(); }
  auto end() const { return reviews_.end(); }
  const std::vector<Review>& reviews() const { return reviews_; }

  bool contains(const std::string& id) const { return by_id_.count(id) > 0; }
  const Review* find(const std::string& id) const;

  const std::string& provenance() const { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

 private:
  std::vector<Review> reviews_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::string provenance_;
};

// One JSON object per line: id, community, hotel_id, reviewer_id,
// timestamp (ISO-8601 with offset), rating, text, label (optional).
// Unknown fields are ignored. Errors name the offending line or id.
Corpus load_jsonl(const std::string& path);
void save_jsonl(const Corpus& c, const std::string& path);

// Unicode scalar count (UTF-8 lead bytes), not byte count.
std::size_t count_unicode_chars(std::string_view text);

Corpus filter_reviews(const Corpus& c, std::size_t min_chars,
                      std::optional<int> rating = std::nullopt);

// n distinct reviews, uniform without replacement; output in draw order.
Corpus sample_uniform(const Corpus& c, std::size_t n, std::uint64_t seed);

std::map<std::string, Corpus> group_by_hotel(const Corpus& c);

// Cumulative review counts per (community, reviewer) at a given instant.
class ReviewerHistory {
 public:
  explicit ReviewerHistory(const Corpus& c);
  // Number of reviews by this reviewer in this community with timestamp <= t.
  std::size_t count_at(const std::string& community, const std::string& reviewer_id,
                       std::int64_t t) const;

 private:
  std::map<std::pair<std::string, std::string>, std::vector<std::int64_t>> times_;
};

// Keeps review r iff its reviewer had posted >= k reviews (r included) in the
// same community by r's timestamp. k = 1 is the identity.
Corpus filter_by_reviewer_min_posts(const Corpus& c, int k);

}  // namespace prevalence
