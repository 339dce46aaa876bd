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
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "parlagest/document.hpp"
#include "parlagest/manifest.hpp"

namespace parlagest {

/// A set of words read from a file, one per line; '#' starts a comment.
/// Lookups ignore a single trailing period and letter case.
class WordList {
 public:
  WordList() = default;
  static WordList load(const std::filesystem::path& path);

  void add(std::string_view word);
  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

  /// The shipped German abbreviation list (data/abbreviations_de.txt).
  static const WordList& default_abbreviations();
  /// The shipped hyphenated proper names (data/hyphenated_names_de.txt).
  static const WordList& default_protected_names();

 private:
  std::set<std::string> words_;
};

/// NFC, CRLF to LF, and removal of control characters other than LF and FF.
std::string normalize_text(std::string_view raw);

/// Rejoins words split as "Bundes-\nregierung". The hyphen stays (and only
/// the line break goes) when the continuation starts with a capital letter
/// or the hyphenated form is a protected name.
std::string dehyphenate(std::string_view text, const WordList& protected_names = WordList::default_protected_names());

/// Text layer of a readable PDF, pages separated by form feeds and
/// dehyphenated. Moves the record to `extracted`.
std::string extract_native_text(DocumentRecord& record,
                                const WordList& protected_names = WordList::default_protected_names());

struct Segmentation {
  std::vector<Span> sentences;
  std::vector<Token> tokens;
};

Segmentation segment(std::string_view text, const WordList& abbreviations = WordList::default_abbreviations());

/// Builds a document from normalized text: sofa plus native sentences and tokens.
AnnotatedDocument build_document(std::string document_id, std::string_view normalized_text,
                                 const WordList& abbreviations = WordList::default_abbreviations());

/// Sidecar JSON payload. A layer that is absent from the JSON is nullopt and
/// leaves the corresponding document layer untouched.
struct SidecarPayload {
  std::string document_id;
  std::string sofa_sha256;
  std::optional<std::vector<Span>> sentences;
  std::optional<std::vector<Span>> tokens;
  std::optional<std::vector<Lemma>> lemmas;
  std::optional<std::vector<PosTag>> pos;
  std::optional<std::vector<MorphFeatures>> morph;
  struct DependencyArc {
    Span span;
    Span governor;
    Span dependent;
    std::string type;
    std::string flavor = "basic";
  };
  std::optional<std::vector<DependencyArc>> dependencies;
  std::optional<std::vector<NamedEntity>> entities;
};

/// Throws PayloadError on malformed JSON or schema violations.
SidecarPayload parse_payload(std::string_view json);
SidecarPayload load_payload(const std::filesystem::path& path);

struct AttachOptions {
  bool replace_segmentation = false;  // take sentences/tokens from the payload when present
};

AnnotatedDocument attach_external_annotations(AnnotatedDocument doc, const SidecarPayload& payload,
                                              const AttachOptions& options = {});

}  // namespace parlagest
