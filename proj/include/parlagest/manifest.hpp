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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "parlagest/types.hpp"

namespace parlagest {

/// One row of a source manifest.
struct ManifestEntry {
  std::string id;
  std::string parliament;
  std::string period_label;
  std::string locator;  // URL (file:, http:, https:) or filesystem path
  FormatHint format_hint = FormatHint::unknown;
  ScriptHint script_hint = ScriptHint::unknown;
  ScanQualityHint scan_quality_hint = ScanQualityHint::unknown;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Declarative registry of documents to ingest. Entry ids are unique.
struct SourceManifest {
  std::vector<ManifestEntry> entries;
  /// Directory relative locators are resolved against (the manifest's
  /// own directory after load_manifest). Not part of equality.
  std::filesystem::path base_dir;

  friend bool operator==(const SourceManifest& a, const SourceManifest& b) {
    return a.entries == b.entries;
  }
};

inline constexpr const char* kManifestHeader =
    "id,parliament,period,locator,format_hint,script_hint,scan_quality_hint";

/// Parses and validates a manifest. Throws ManifestError carrying the line
/// number of the offending row.
SourceManifest load_manifest(const std::filesystem::path& path);
SourceManifest parse_manifest(const std::string& text);
std::string format_manifest(const SourceManifest& manifest);
void write_manifest(const SourceManifest& manifest, const std::filesystem::path& path);

/// Lifecycle state of one protocol.
struct DocumentRecord {
  std::string id;
  std::string parliament;
  std::string period_label;
  std::string locator;
  std::filesystem::path local_path;
  FormatHint format_hint = FormatHint::unknown;
  ScriptHint script_hint = ScriptHint::unknown;
  ScanQualityHint scan_quality_hint = ScanQualityHint::unknown;
  std::optional<Classification> classification;
  Script script = Script::antiqua;
  int page_count = 0;  // known from state classified on
  std::optional<Provenance> provenance;
  DocumentState state = DocumentState::fetched;

  friend bool operator==(const DocumentRecord&, const DocumentRecord&) = default;
};

/// Moves `record` to `next`; throws PreconditionError on a backwards move.
void advance_state(DocumentRecord& record, DocumentState next);

/// Throws ValidationError when a record breaks one of its invariants.
void validate_record(const DocumentRecord& record);

struct FetchFailure {
  std::string id;
  std::string message;
};

struct FetchOptions {
  int delay_ms = 0;  // pause between remote downloads
  std::size_t workers = 1;
};

struct FetchResult {
  std::vector<DocumentRecord> records;
  std::vector<FetchFailure> failures;
  std::uintmax_t bytes_transferred = 0;
};

/// Places every entry's bytes at <store>/<parliament>/<id>.pdf. Files that
/// are already present are left untouched. Per-entry failures are
/// collected; the batch always runs to completion.
FetchResult fetch_documents(const SourceManifest& manifest, const std::filesystem::path& store,
                            const FetchOptions& options = {});

std::filesystem::path store_path_for(const std::filesystem::path& store,
                                     const std::string& parliament, const std::string& id);

struct ClassifyOptions {
  double min_chars_per_page = 50.0;
};

/// Average count of non-whitespace characters extractable per page.
double extractable_chars_per_page(const std::filesystem::path& pdf_path);

/// Decides readable vs. scanned. A format_hint other than `unknown` wins
/// over the character-density heuristic. Throws ClassificationError for
/// unreadable PDFs.
DocumentRecord classify_document(DocumentRecord record, const ClassifyOptions& options = {});

// Persistence of records between individually invoked pipeline stages.
std::vector<DocumentRecord> load_records(const std::filesystem::path& path);
void save_records(const std::vector<DocumentRecord>& records, const std::filesystem::path& path);

}  // namespace parlagest
