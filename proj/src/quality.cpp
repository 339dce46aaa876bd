// Copyright 2026 The parlagest Authors
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

#include "parlagest/quality.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "parlagest/error.hpp"
#include "parlagest/unicode.hpp"

namespace parlagest {

int osa_distance(std::u32string_view a, std::u32string_view b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<int> prev2(m + 1), prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      const int cost = a[i - 1] == b[j - 1] ? 0 : 1;
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        cur[j] = std::min(cur[j], prev2[j - 2] + 1);
      }
    }
    std::swap(prev2, prev);
    std::swap(prev, cur);
  }
  return prev[m];
}

namespace {

std::uint64_t hash_of(std::u32string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (char32_t c : s) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ull;
  }
  return h;
}

void collect_deletes(const std::u32string& s, int depth, std::vector<std::u32string>& out) {
  out.push_back(s);
  if (depth == 0 || s.empty()) return;
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::u32string d = s;
    d.erase(i, 1);
    collect_deletes(d, depth - 1, out);
  }
}

std::vector<std::u32string> deletes_of(std::u32string_view word, int prefix_length, int max_distance) {
  std::vector<std::u32string> out;
  collect_deletes(std::u32string(word.substr(0, static_cast<std::size_t>(prefix_length))), max_distance, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

FrequencyDictionary::FrequencyDictionary(int max_edit_distance, int prefix_length)
    : max_distance_(max_edit_distance), prefix_length_(prefix_length) {
  if (max_edit_distance < 0) throw ConfigError("max_edit_distance must be >= 0");
  if (prefix_length < 1 || prefix_length <= max_edit_distance) {
    throw ConfigError("prefix_length must exceed max_edit_distance");
  }
}

FrequencyDictionary FrequencyDictionary::load(const std::filesystem::path& path, int max_edit_distance,
                                              int prefix_length) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read dictionary " + path.string());
  FrequencyDictionary dict(max_edit_distance, prefix_length);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string word;
    std::uint64_t freq = 0;
    if (!(fields >> word)) continue;
    if (!(fields >> freq) || freq == 0) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 'word frequency'");
    }
    dict.add(word, freq);
  }
  return dict;
}

const FrequencyDictionary& FrequencyDictionary::default_german() {
  static const FrequencyDictionary dict = load(data_file("de_frequency.txt"));
  return dict;
}

void FrequencyDictionary::add(std::string_view word, std::uint64_t frequency) {
  if (word.empty()) throw ValidationError("dictionary word must be non-empty");
  if (frequency == 0) throw ValidationError("dictionary frequency must be positive");
  std::u32string w = unicode::to_lower(unicode::decode(word));
  auto it = std::lower_bound(sorted_words_.begin(), sorted_words_.end(), w,
                             [](const auto& entry, const std::u32string& key) { return entry.first < key; });
  if (it != sorted_words_.end() && it->first == w) {
    freqs_[it->second] += frequency;
    return;
  }
  sorted_words_.insert(it, {w, words_.size()});
  words_.push_back(std::move(w));
  freqs_.push_back(frequency);
  indexed_ = false;
}

void FrequencyDictionary::ensure_index() const {
  if (indexed_) return;
  deletes_.clear();
  for (std::size_t i = 0; i < words_.size(); ++i) {
    for (const auto& d : deletes_of(words_[i], prefix_length_, max_distance_)) {
      deletes_.emplace_back(hash_of(d), static_cast<std::uint32_t>(i));
    }
  }
  std::sort(deletes_.begin(), deletes_.end());
  deletes_.erase(std::unique(deletes_.begin(), deletes_.end()), deletes_.end());
  indexed_ = true;
}

std::optional<std::uint64_t> FrequencyDictionary::frequency(std::string_view word) const {
  const std::u32string w = unicode::to_lower(unicode::decode(word));
  auto it = std::lower_bound(sorted_words_.begin(), sorted_words_.end(), w,
                             [](const auto& entry, const std::u32string& key) { return entry.first < key; });
  if (it != sorted_words_.end() && it->first == w) return freqs_[it->second];
  return std::nullopt;
}

std::optional<Suggestion> FrequencyDictionary::lookup(std::string_view word) const {
  const std::u32string query = unicode::to_lower(unicode::decode(word));
  if (query.empty()) return std::nullopt;
  if (auto f = frequency(word)) return Suggestion{unicode::encode(query), 0, *f};
  if (max_distance_ == 0) return std::nullopt;
  ensure_index();

  std::optional<std::size_t> best;
  int best_distance = max_distance_ + 1;
  std::vector<std::uint32_t> seen;
  for (const auto& d : deletes_of(query, prefix_length_, max_distance_)) {
    const std::uint64_t h = hash_of(d);
    auto range = std::equal_range(deletes_.begin(), deletes_.end(), std::pair<std::uint64_t, std::uint32_t>{h, 0},
                                  [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto it = range.first; it != range.second; ++it) seen.push_back(it->second);
  }
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());

  for (std::uint32_t idx : seen) {
    const std::u32string& cand = words_[idx];
    const auto len_diff = static_cast<int>(cand.size()) - static_cast<int>(query.size());
    if (std::abs(len_diff) > max_distance_) continue;
    const int dist = osa_distance(query, cand);
    if (dist > max_distance_) continue;
    bool better = !best || dist < best_distance;
    if (best && dist == best_distance) {
      better = freqs_[idx] > freqs_[*best] || (freqs_[idx] == freqs_[*best] && cand < words_[*best]);
    }
    if (better) {
      best = idx;
      best_distance = dist;
    }
  }
  if (!best) return std::nullopt;
  return Suggestion{unicode::encode(words_[*best]), best_distance, freqs_[*best]};
}

bool is_checkable(std::string_view token_text) {
  // Letters only, or letters mixed with digits: either way at least one
  // letter and nothing outside letters and digits.
  bool letter = false;
  for (char32_t c : unicode::decode(token_text)) {
    if (unicode::is_letter(c)) {
      letter = true;
    } else if (!unicode::is_digit(c)) {
      return false;
    }
  }
  return letter;
}

std::string_view to_string(SpellResult r) {
  switch (r) {
    case SpellResult::correct: return "correct";
    case SpellResult::wrong: return "wrong";
    case SpellResult::unknown: return "unknown";
  }
  return "?";
}

SpellResult spellcheck_token(std::string_view token_text, const FrequencyDictionary& dict) {
  const auto s = dict.lookup(token_text);
  if (!s) return SpellResult::unknown;
  return s->word == unicode::to_lower(token_text) ? SpellResult::correct : SpellResult::wrong;
}

double round2(double value) { return std::round(value * 100.0) / 100.0; }

QualityReport make_report(std::string key, std::string group, const QualityCounts& counts) {
  QualityReport r;
  r.key = std::move(key);
  r.group = std::move(group);
  r.counts = counts;
  const double c = static_cast<double>(counts.correct);
  const double w = static_cast<double>(counts.wrong);
  const double u = static_cast<double>(counts.unknown);
  const double total = c + w + u;
  if (total > 0) {
    r.pct_right = round2(100.0 * c / total);
    r.pct_wrong = round2(100.0 * w / total);
    r.pct_unknown = round2(100.0 * u / total);
    r.unknown_good_quality = r.pct_right;
  }
  if (c + w > 0) r.good_quality = round2(100.0 * c / (c + w));
  return r;
}

QualityReport score_document(const AnnotatedDocument& doc, const FrequencyDictionary& dict) {
  QualityCounts counts;
  const std::u32string sofa = unicode::decode(doc.sofa);
  for (const Token& t : doc.tokens) {
    const std::string text = unicode::encode(std::u32string_view(sofa).substr(t.span.begin, t.span.size()));
    if (!is_checkable(text)) {
      ++counts.skipped;
      continue;
    }
    switch (spellcheck_token(text, dict)) {
      case SpellResult::correct: ++counts.correct; break;
      case SpellResult::wrong: ++counts.wrong; break;
      case SpellResult::unknown: ++counts.unknown; break;
    }
  }
  return make_report(doc.document_id, doc.parliament, counts);
}

std::vector<QualityReport> aggregate_reports(const std::vector<QualityReport>& reports) {
  std::vector<std::string> order;
  std::map<std::string, QualityCounts> sums;
  for (const auto& r : reports) {
    auto [it, inserted] = sums.try_emplace(r.group);
    if (inserted) order.push_back(r.group);
    it->second.skipped += r.counts.skipped;
    it->second.correct += r.counts.correct;
    it->second.wrong += r.counts.wrong;
    it->second.unknown += r.counts.unknown;
  }
  std::vector<QualityReport> out;
  for (const auto& g : order) out.push_back(make_report(g, g, sums[g]));
  return out;
}

namespace {

std::string pct(const std::optional<double>& v) {
  if (!v) return {};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

std::string csv_escape(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

std::string format_quality_csv(const std::vector<QualityReport>& reports) {
  std::string out = std::string(kQualityCsvHeader) + "\n";
  for (const auto& r : reports) {
    out += csv_escape(r.key) + "," + std::to_string(r.counts.skipped) + "," + std::to_string(r.counts.correct) + "," +
           std::to_string(r.counts.wrong) + "," + std::to_string(r.counts.unknown) + "," + pct(r.pct_right) + "," +
           pct(r.pct_wrong) + "," + pct(r.pct_unknown) + "," + pct(r.good_quality) + "," +
           pct(r.unknown_good_quality) + "\n";
  }
  return out;
}

}  // namespace parlagest
