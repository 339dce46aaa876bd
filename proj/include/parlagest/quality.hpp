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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "parlagest/document.hpp"

namespace parlagest {

/// Restricted Damerau-Levenshtein (optimal string alignment) distance.
int osa_distance(std::u32string_view a, std::u32string_view b);

struct Suggestion {
  std::string word;
  int distance = 0;
  std::uint64_t frequency = 0;

  friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

/// Word frequencies with a symmetric-delete index over word prefixes.
/// Words are stored lowercased; lookups are case-insensitive.
class FrequencyDictionary {
 public:
  explicit FrequencyDictionary(int max_edit_distance = 2, int prefix_length = 7);

  /// Reads `word frequency` lines. Frequencies of repeated words add up.
  static FrequencyDictionary load(const std::filesystem::path& path, int max_edit_distance = 2,
                                  int prefix_length = 7);
  /// The shipped German list (data/de_frequency.txt).
  static const FrequencyDictionary& default_german();

  /// Throws ValidationError for an empty word or zero frequency.
  void add(std::string_view word, std::uint64_t frequency);

  /// Closest entry within max_edit_distance: smallest distance, then
  /// highest frequency, then lexicographically smallest.
  std::optional<Suggestion> lookup(std::string_view word) const;

  std::optional<std::uint64_t> frequency(std::string_view word) const;
  std::size_t size() const { return words_.size(); }
  int max_edit_distance() const { return max_distance_; }
  int prefix_length() const { return prefix_length_; }
  const std::vector<std::u32string>& words() const { return words_; }
  const std::vector<std::uint64_t>& frequencies() const { return freqs_; }

 private:
  void ensure_index() const;

  int max_distance_;
  int prefix_length_;
  std::vector<std::u32string> words_;
  std::vector<std::uint64_t> freqs_;
  std::vector<std::pair<std::u32string, std::size_t>> sorted_words_;  // for exact lookups
  mutable std::vector<std::pair<std::uint64_t, std::uint32_t>> deletes_;  // (hash, word index), sorted
  mutable bool indexed_ = false;
};

/// Letters only, or letters and digits with at least one of each.
bool is_checkable(std::string_view token_text);

enum class SpellResult { correct, wrong, unknown };
std::string_view to_string(SpellResult r);

SpellResult spellcheck_token(std::string_view token_text, const FrequencyDictionary& dict);

struct QualityCounts {
  std::uint64_t skipped = 0;
  std::uint64_t correct = 0;
  std::uint64_t wrong = 0;
  std::uint64_t unknown = 0;

  friend bool operator==(const QualityCounts&, const QualityCounts&) = default;
};

/// Percentages rounded half away from zero to two decimals; nullopt when
/// the denominator is zero.
struct QualityReport {
  std::string key;    // document id or group name
  std::string group;  // parliament
  QualityCounts counts;
  std::optional<double> pct_right;
  std::optional<double> pct_wrong;
  std::optional<double> pct_unknown;
  std::optional<double> good_quality;
  std::optional<double> unknown_good_quality;

  friend bool operator==(const QualityReport&, const QualityReport&) = default;
};

double round2(double value);

QualityReport make_report(std::string key, std::string group, const QualityCounts& counts);

QualityReport score_document(const AnnotatedDocument& doc, const FrequencyDictionary& dict);

/// One report per group with summed counts; percentages recomputed. Groups
/// appear in order of first occurrence.
std::vector<QualityReport> aggregate_reports(const std::vector<QualityReport>& reports);

inline constexpr const char* kQualityCsvHeader =
    "key,n_skipped,n_correct,n_wrong,n_unknown,pct_right,pct_wrong,pct_unknown,good_quality,unknown_good_quality";

/// CSV with kQualityCsvHeader; undefined percentages are empty fields.
std::string format_quality_csv(const std::vector<QualityReport>& reports);

}  // namespace parlagest
