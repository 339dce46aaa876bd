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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "parlagest/types.hpp"

namespace parlagest {

/// Half-open range [begin, end) in Unicode scalar values of the sofa.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend auto operator<=>(const Span&, const Span&) = default;
};

/// Layer references are indices into the owning document's vectors.
struct Token {
  Span span;
  std::optional<std::size_t> lemma;
  std::optional<std::size_t> pos;
  std::optional<std::size_t> morph;
  int order = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Lemma {
  Span span;
  std::string value;
  friend bool operator==(const Lemma&, const Lemma&) = default;
};

struct PosTag {
  Span span;
  std::string value;
  friend bool operator==(const PosTag&, const PosTag&) = default;
};

/// Morphological features kept in their canonical `Key=Val|Key=Val` form.
/// Key order is whatever the producer emitted.
struct MorphFeatures {
  Span span;
  std::string value;

  using Features = std::vector<std::pair<std::string, std::string>>;

  /// Splits `value`; throws ValidationError on an entry without '='.
  static Features parse(std::string_view value);
  static std::string join(const Features& features);
  static MorphFeatures from_features(Span span, const Features& features);

  Features features() const { return parse(value); }
  std::optional<std::string> feature(std::string_view key) const;
  std::optional<std::string> gender() const { return feature("Gender"); }
  std::optional<std::string> number() const { return feature("Number"); }
  std::optional<std::string> grammatical_case() const { return feature("Case"); }

  friend bool operator==(const MorphFeatures&, const MorphFeatures&) = default;
};

struct Dependency {
  Span span;
  std::size_t governor = 0;   // token index
  std::size_t dependent = 0;  // token index
  std::string type;
  std::string flavor = "basic";

  friend bool operator==(const Dependency&, const Dependency&) = default;
};

/// Dependency labels under which a token may govern itself.
bool is_root_dependency_type(std::string_view type);

struct NamedEntity {
  Span span;
  std::string label;
  friend bool operator==(const NamedEntity&, const NamedEntity&) = default;
};

struct SessionMetadata {
  std::string title;
  std::string subtitle;  // "<L>.Wahlperiode__<S>.Sitzung" or empty
  int day = 1;
  int month = 1;
  int year = 1970;
  std::int64_t timestamp_ms = 0;

  friend bool operator==(const SessionMetadata&, const SessionMetadata&) = default;
};

struct DocumentMetaData {
  std::string language = "de";
  std::string document_title;
  std::string document_id;
  std::string document_uri;
  std::string document_base_uri;
  bool is_last_segment = false;

  friend bool operator==(const DocumentMetaData&, const DocumentMetaData&) = default;
};

struct AnnotatedDocument {
  std::string document_id;
  std::string sofa;  // UTF-8
  std::vector<Span> sentences;
  std::vector<Token> tokens;
  std::vector<Lemma> lemmas;
  std::vector<PosTag> pos_tags;
  std::vector<MorphFeatures> morph;
  std::vector<Dependency> dependencies;
  std::vector<NamedEntity> entities;
  std::optional<SessionMetadata> metadata;  // empty: packaged without a date
  DocumentMetaData document_meta;
  Provenance provenance = Provenance::native_text;
  Script script = Script::antiqua;
  std::string parliament;
  std::string annotation_note;  // e.g. "sidecar" once external layers are attached

  std::size_t length() const;
  std::string text(Span span) const;

  friend bool operator==(const AnnotatedDocument&, const AnnotatedDocument&) = default;
};

/// Converts text into a sofa: form feeds become newlines so the sofa stays
/// representable in XML 1.0. Offsets are unchanged by the mapping.
std::string to_sofa(std::string_view text);

/// Throws ValidationError naming the first violated invariant.
void validate(const AnnotatedDocument& doc);

}  // namespace parlagest
