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

#include "parlagest/types.hpp"

#include <array>
#include <cstdlib>
#include <utility>

namespace parlagest {
namespace {

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E v) {
  for (const auto& [e, name] : table) {
    if (e == v) return name;
  }
  return "?";
}

template <typename E, std::size_t N>
std::optional<E> value_of(const std::array<std::pair<E, std::string_view>, N>& table,
                          std::string_view s) {
  for (const auto& [e, name] : table) {
    if (name == s) return e;
  }
  return std::nullopt;
}

constexpr std::array<std::pair<FormatHint, std::string_view>, 3> kFormatHints{{
    {FormatHint::readable, "readable"},
    {FormatHint::scanned, "scanned"},
    {FormatHint::unknown, "unknown"},
}};
constexpr std::array<std::pair<ScriptHint, std::string_view>, 3> kScriptHints{{
    {ScriptHint::antiqua, "antiqua"},
    {ScriptHint::fraktur, "fraktur"},
    {ScriptHint::unknown, "unknown"},
}};
constexpr std::array<std::pair<ScanQualityHint, std::string_view>, 3> kQualityHints{{
    {ScanQualityHint::good, "good"},
    {ScanQualityHint::poor, "poor"},
    {ScanQualityHint::unknown, "unknown"},
}};
constexpr std::array<std::pair<Classification, std::string_view>, 2> kClassifications{{
    {Classification::readable, "readable"},
    {Classification::scanned, "scanned"},
}};
constexpr std::array<std::pair<Script, std::string_view>, 2> kScripts{{
    {Script::antiqua, "antiqua"},
    {Script::fraktur, "fraktur"},
}};
constexpr std::array<std::pair<Provenance, std::string_view>, 2> kProvenances{{
    {Provenance::native_text, "native_text"},
    {Provenance::ocr, "ocr"},
}};
constexpr std::array<std::pair<DocumentState, std::string_view>, 6> kStates{{
    {DocumentState::fetched, "fetched"},
    {DocumentState::classified, "classified"},
    {DocumentState::imaged, "imaged"},
    {DocumentState::extracted, "extracted"},
    {DocumentState::annotated, "annotated"},
    {DocumentState::packaged, "packaged"},
}};

}  // namespace

std::string_view to_string(FormatHint v) { return name_of(kFormatHints, v); }
std::string_view to_string(ScriptHint v) { return name_of(kScriptHints, v); }
std::string_view to_string(ScanQualityHint v) { return name_of(kQualityHints, v); }
std::string_view to_string(Classification v) { return name_of(kClassifications, v); }
std::string_view to_string(Script v) { return name_of(kScripts, v); }
std::string_view to_string(Provenance v) { return name_of(kProvenances, v); }
std::string_view to_string(DocumentState v) { return name_of(kStates, v); }

std::optional<FormatHint> parse_format_hint(std::string_view s) { return value_of(kFormatHints, s); }
std::optional<ScriptHint> parse_script_hint(std::string_view s) { return value_of(kScriptHints, s); }
std::optional<ScanQualityHint> parse_scan_quality_hint(std::string_view s) {
  return value_of(kQualityHints, s);
}
std::optional<Classification> parse_classification(std::string_view s) {
  return value_of(kClassifications, s);
}
std::optional<Script> parse_script(std::string_view s) { return value_of(kScripts, s); }
std::optional<Provenance> parse_provenance(std::string_view s) { return value_of(kProvenances, s); }
std::optional<DocumentState> parse_document_state(std::string_view s) {
  return value_of(kStates, s);
}

std::filesystem::path data_file(std::string_view name) {
  const char* env = std::getenv("PARLAGEST_DATA_DIR");
  const std::filesystem::path dir = env && *env ? env : PARLAGEST_DATA_DIR;
  return dir / name;
}

}  // namespace parlagest
