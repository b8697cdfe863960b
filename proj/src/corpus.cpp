#include "prevalence/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "prevalence/errors.hpp"
#include "prevalence/rng.hpp"
#include "prevalence/timeutil.hpp"

namespace prevalence {

using nlohmann::json;

void Corpus::add(Review r) {
  if (r.rating < 1 || r.rating > 5) {
    throw ValidationError("review " + r.id + ": rating must be in 1..5");
  }
  if (r.label && *r.label != 0 && *r.label != 1) {
    throw ValidationError("review " + r.id + ": label must be 0 or 1");
  }
  auto [it, inserted] = by_id_.emplace(r.id, reviews_.size());
  if (!inserted) {
    throw ValidationError("duplicate review id: " + r.id);
  }
  reviews_.push_back(std::move(r));
}

const Review* Corpus::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &reviews_[it->second];
}

namespace {

const json& require_field(const json& obj, const char* name, std::size_t line_no) {
  auto it = obj.find(name);
  if (it == obj.end() || it->is_null()) {
    throw ValidationError("line " + std::to_string(line_no) + ": missing field " + name);
  }
  return *it;
}

std::string require_string(const json& obj, const char* name, std::size_t line_no) {
  const json& v = require_field(obj, name, line_no);
  if (!v.is_string()) {
    throw ValidationError("line " + std::to_string(line_no) + ": field " + name +
                          " must be a string");
  }
  return v.get<std::string>();
}

}  // namespace

Corpus load_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  Corpus c(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object()) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected a JSON object");
    }

    Review r;
    r.id = require_string(obj, "id", line_no);
    r.community = require_string(obj, "community", line_no);
    r.hotel_id = require_string(obj, "hotel_id", line_no);
    r.reviewer_id = require_string(obj, "reviewer_id", line_no);
    r.text = require_string(obj, "text", line_no);

    const json& rating = require_field(obj, "rating", line_no);
    if (!rating.is_number_integer()) {
      throw ValidationError("line " + std::to_string(line_no) + ": field rating must be an integer");
    }
    r.rating = rating.get<int>();

    const std::string ts = require_string(obj, "timestamp", line_no);
    try {
      r.timestamp = parse_iso8601(ts);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }

    if (auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
      if (!it->is_number_integer()) {
        throw ValidationError("line " + std::to_string(line_no) + ": field label must be 0 or 1");
      }
      r.label = it->get<int>();
    }

    try {
      c.add(std::move(r));
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return c;
}

void save_jsonl(const Corpus& c, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (const Review& r : c) {
    nlohmann::ordered_json obj;
    obj["id"] = r.id;
    obj["community"] = r.community;
    obj["hotel_id"] = r.hotel_id;
    obj["reviewer_id"] = r.reviewer_id;
    obj["timestamp"] = format_iso8601_utc(r.timestamp);
    obj["rating"] = r.rating;
    obj["text"] = r.text;
    if (r.label) obj["label"] = *r.label;
    out << obj.dump() << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

std::size_t count_unicode_chars(std::string_view text) {
  std::size_t n = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) != 0x80) ++n;  // count everything but continuation bytes
  }
  return n;
}

Corpus filter_reviews(const Corpus& c, std::size_t min_chars, std::optional<int> rating) {
  Corpus out(c.provenance());
  for (const Review& r : c) {
    if (count_unicode_chars(r.text) < min_chars) continue;
    if (rating && r.rating != *rating) continue;
    out.add(r);
  }
  return out;
}

Corpus sample_uniform(const Corpus& c, std::size_t n, std::uint64_t seed) {
  if (n > c.size()) {
    throw ValidationError("sample_uniform: n (" + std::to_string(n) + ") exceeds corpus size (" +
                          std::to_string(c.size()) + ")");
  }
  std::vector<std::size_t> idx(c.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  // Partial Fisher-Yates: position i gets a uniform draw from the remainder.
  Corpus out(c.provenance());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
    out.add(c[idx[i]]);
  }
  return out;
}

std::map<std::string, Corpus> group_by_hotel(const Corpus& c) {
  std::map<std::string, Corpus> groups;
  for (const Review& r : c) {
    auto [it, inserted] = groups.try_emplace(r.hotel_id, Corpus(c.provenance()));
    it->second.add(r);
  }
  return groups;
}

ReviewerHistory::ReviewerHistory(const Corpus& c) {
  for (const Review& r : c) {
    times_[{r.community, r.reviewer_id}].push_back(r.timestamp);
  }
  for (auto& [key, v] : times_) std::sort(v.begin(), v.end());
}

std::size_t ReviewerHistory::count_at(const std::string& community,
                                      const std::string& reviewer_id, std::int64_t t) const {
  auto it = times_.find({community, reviewer_id});
  if (it == times_.end()) return 0;
  const auto& v = it->second;
  return static_cast<std::size_t>(std::upper_bound(v.begin(), v.end(), t) - v.begin());
}

Corpus filter_by_reviewer_min_posts(const Corpus& c, int k) {
  if (k < 1) throw ValidationError("filter_by_reviewer_min_posts: k must be >= 1");
  if (k == 1) return c;
  ReviewerHistory history(c);
  Corpus out(c.provenance());
  for (const Review& r : c) {
    if (history.count_at(r.community, r.reviewer_id, r.timestamp) >=
        static_cast<std::size_t>(k)) {
      out.add(r);
    }
  }
  return out;
}

}  // namespace prevalence
