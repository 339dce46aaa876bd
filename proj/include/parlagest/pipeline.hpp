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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parlagest/annotate.hpp"
#include "parlagest/manifest.hpp"
#include "parlagest/ocr.hpp"
#include "parlagest/quality.hpp"

namespace parlagest {

struct PipelineConfig {
  std::filesystem::path manifest_path;
  std::filesystem::path store_path;
  std::filesystem::path out_path;
  int dpi = 300;
  std::string ocr_engine = "tesseract";
  std::vector<std::string> ocr_extra_args;
  OcrStrategy ocr_strategy = OcrStrategy::four_core_few_jobs;
  int total_threads = 1;
  std::filesystem::path dictionary_path;       // empty: shipped German list
  std::filesystem::path abbreviations_path;    // empty: shipped list
  std::filesystem::path protected_names_path;  // empty: shipped list
  bool keep_images = false;
  bool gzip = true;
  bool replace_segmentation = false;
  int fetch_delay_ms = 0;
  double min_chars_per_page = 50.0;

  /// Throws ConfigError.
  void validate() const;
};

/// Hardware threads, at least 1.
int default_thread_count();

struct StageFailure {
  std::string id;
  std::string stage;
  std::string cause;
};

struct RunSummary {
  std::size_t manifest_entries = 0;
  std::size_t fetched = 0;
  std::uint64_t bytes_transferred = 0;
  std::size_t classified = 0;
  std::size_t readable = 0;
  std::size_t scanned = 0;
  std::size_t enhanced_pages = 0;
  std::size_t ocr_pages = 0;
  std::size_t extracted = 0;
  std::size_t annotated = 0;
  std::size_t sidecar_attached = 0;
  std::size_t packaged = 0;
  std::size_t metadata_missing = 0;
  std::size_t quality_reports = 0;
  std::vector<StageFailure> failures;
};

std::string format_summary(const RunSummary& summary);

/// Stages read and write their state under the store directory
/// (records.json plus per-document intermediates) so each one can be rerun
/// on its own. Per-document failures are collected, never thrown;
/// configuration problems throw ConfigError and manifest problems
/// ManifestError.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config, std::ostream* progress = nullptr);

  RunSummary run();

  void fetch(RunSummary& summary);
  void classify(RunSummary& summary);
  void extract(RunSummary& summary);  // native text or rasterize/enhance/OCR
  void annotate(RunSummary& summary);
  void package(RunSummary& summary);
  void quality(RunSummary& summary);

  /// Writes `<out>/failures.csv`.
  void write_failures(const RunSummary& summary) const;

  const PipelineConfig& config() const { return config_; }
  std::filesystem::path records_path() const;
  std::filesystem::path document_dir(const DocumentRecord& record) const;

 private:
  std::vector<DocumentRecord> load_records_or_empty() const;
  const FrequencyDictionary& dictionary();
  const WordList& abbreviations();
  const WordList& protected_names();
  void say(const std::string& line) const;

  PipelineConfig config_;
  std::ostream* progress_;
  std::optional<FrequencyDictionary> dictionary_;
  std::optional<WordList> abbreviations_;
  std::optional<WordList> protected_names_;
};

/// Packaged XMI files under `corpus_dir`, sorted by path.
std::vector<std::filesystem::path> list_corpus_files(const std::filesystem::path& corpus_dir);

enum class SubcorpusFilter { all, no_ocr, ocr_only, fraktur_only };
std::string_view to_string(SubcorpusFilter f);
std::optional<SubcorpusFilter> parse_subcorpus_filter(std::string_view s);

struct UnreadableDocument {
  std::filesystem::path path;
  std::string error;
};

struct SubcorpusResult {
  std::vector<std::filesystem::path> documents;
  std::vector<UnreadableDocument> unreadable;
};

SubcorpusResult filter_subcorpus(const std::filesystem::path& corpus_dir, SubcorpusFilter filter);

struct ParliamentStats {
  std::string parliament;
  std::uint64_t sessions = 0;
  std::uint64_t sentences = 0;
  std::uint64_t tokens = 0;

  friend bool operator==(const ParliamentStats&, const ParliamentStats&) = default;
};

struct CorpusStats {
  std::vector<ParliamentStats> rows;  // sorted by parliament
  std::vector<UnreadableDocument> unreadable;
};

CorpusStats compute_corpus_stats(const std::filesystem::path& corpus_dir);

/// Adds one document to the per-parliament rows.
void accumulate_stats(std::vector<ParliamentStats>& rows, const AnnotatedDocument& doc);

inline constexpr const char* kStatsCsvHeader = "parliament,sessions,sentences,tokens";
std::string format_stats_csv(const CorpusStats& stats);
std::string format_stats_table(const CorpusStats& stats);

}  // namespace parlagest
