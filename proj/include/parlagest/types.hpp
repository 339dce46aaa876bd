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
#include <string_view>

namespace parlagest {

enum class FormatHint { readable, scanned, unknown };
enum class ScriptHint { antiqua, fraktur, unknown };
enum class ScanQualityHint { good, poor, unknown };

enum class Classification { readable, scanned };
enum class Script { antiqua, fraktur };
enum class Provenance { native_text, ocr };

/// Lifecycle of a document through the pipeline; transitions only move forward.
enum class DocumentState { fetched, classified, imaged, extracted, annotated, packaged };

std::string_view to_string(FormatHint v);
std::string_view to_string(ScriptHint v);
std::string_view to_string(ScanQualityHint v);
std::string_view to_string(Classification v);
std::string_view to_string(Script v);
std::string_view to_string(Provenance v);
std::string_view to_string(DocumentState v);

// Parsers return nullopt for anything outside the closed enum.
std::optional<FormatHint> parse_format_hint(std::string_view s);
std::optional<ScriptHint> parse_script_hint(std::string_view s);
std::optional<ScanQualityHint> parse_scan_quality_hint(std::string_view s);
std::optional<Classification> parse_classification(std::string_view s);
std::optional<Script> parse_script(std::string_view s);
std::optional<Provenance> parse_provenance(std::string_view s);
std::optional<DocumentState> parse_document_state(std::string_view s);

/// Location of a shipped data file: $PARLAGEST_DATA_DIR when set, else the
/// directory configured at build time.
std::filesystem::path data_file(std::string_view name);

}  // namespace parlagest
