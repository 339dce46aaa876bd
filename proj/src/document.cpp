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

#include "parlagest/document.hpp"

#include <chrono>

#include "parlagest/error.hpp"
#include "parlagest/unicode.hpp"

namespace parlagest {

MorphFeatures::Features MorphFeatures::parse(std::string_view value) {
  Features out;
  if (value.empty()) return out;
  std::size_t start = 0;
  while (start <= value.size()) {
    auto bar = value.find('|', start);
    if (bar == std::string_view::npos) bar = value.size();
    const auto item = value.substr(start, bar - start);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ValidationError("morphological feature '" + std::string(item) + "' is not Key=Value");
    }
    out.emplace_back(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    start = bar + 1;
  }
  return out;
}

std::string MorphFeatures::join(const Features& features) {
  std::string out;
  for (const auto& [k, v] : features) {
    if (!out.empty()) out.push_back('|');
    out += k + "=" + v;
  }
  return out;
}

MorphFeatures MorphFeatures::from_features(Span span, const Features& features) {
  return MorphFeatures{span, join(features)};
}

std::optional<std::string> MorphFeatures::feature(std::string_view key) const {
  for (auto& [k, v] : parse(value)) {
    if (k == key) return v;
  }
  return std::nullopt;
}

bool is_root_dependency_type(std::string_view type) {
  return type == "ROOT" || type == "root" || type == "--";
}

std::size_t AnnotatedDocument::length() const { return unicode::length(sofa); }

std::string AnnotatedDocument::text(Span span) const { return unicode::substr(sofa, span.begin, span.end); }

std::string to_sofa(std::string_view text) {
  std::string out(text);
  for (auto& c : out) {
    if (c == '\f') c = '\n';
  }
  return out;
}

namespace {

[[noreturn]] void fail(const std::string& what) { throw ValidationError(what); }

std::string describe(const char* layer, std::size_t i, Span s) {
  return std::string(layer) + "[" + std::to_string(i) + "] [" + std::to_string(s.begin) + "," +
         std::to_string(s.end) + ")";
}

template <typename T>
void check_spans(const std::vector<T>& items, const char* layer, std::size_t len) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Span s = items[i].span;
    if (s.begin > s.end || s.end > len) {
      fail("span within sofa: " + describe(layer, i, s) + " exceeds length " + std::to_string(len));
    }
  }
}

template <typename T>
void check_reference(const Token& t, std::size_t ti, const std::optional<std::size_t>& ref,
                     const std::vector<T>& layer, const char* name) {
  if (!ref) return;
  if (*ref >= layer.size()) fail("token reference resolves: " + describe("token", ti, t.span) + " " + name + " missing");
  if (layer[*ref].span != t.span) {
    fail("token reference spans match: " + describe("token", ti, t.span) + " " + name + " at " +
         describe(name, *ref, layer[*ref].span));
  }
}

}  // namespace

void validate(const AnnotatedDocument& doc) {
  const std::u32string decoded = unicode::decode(doc.sofa);
  if (unicode::encode(decoded) != doc.sofa) fail("sofa is valid UTF-8");
  for (char32_t c : decoded) {
    if (!unicode::is_xml_char(c)) fail("sofa representable in XML 1.0");
  }
  const std::size_t len = doc.length();

  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    const Span s = doc.sentences[i];
    if (s.begin > s.end || s.end > len) fail("span within sofa: " + describe("sentence", i, s));
  }
  check_spans(doc.tokens, "token", len);
  check_spans(doc.lemmas, "lemma", len);
  check_spans(doc.pos_tags, "pos", len);
  check_spans(doc.morph, "morph", len);
  check_spans(doc.dependencies, "dependency", len);
  check_spans(doc.entities, "entity", len);

  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const Token& t = doc.tokens[i];
    if (t.order < 0) fail("token order >= 0: " + describe("token", i, t.span));
    if (i > 0 && doc.tokens[i - 1].span.end > t.span.begin) {
      fail("tokens sorted and non-overlapping: " + describe("token", i, t.span));
    }
    check_reference(t, i, t.lemma, doc.lemmas, "lemma");
    check_reference(t, i, t.pos, doc.pos_tags, "pos");
    check_reference(t, i, t.morph, doc.morph, "morph");
  }
  for (std::size_t i = 0; i < doc.lemmas.size(); ++i) {
    if (doc.lemmas[i].value.empty()) fail("lemma value non-empty: " + describe("lemma", i, doc.lemmas[i].span));
  }
  for (std::size_t i = 0; i < doc.pos_tags.size(); ++i) {
    if (doc.pos_tags[i].value.empty()) fail("pos value non-empty: " + describe("pos", i, doc.pos_tags[i].span));
  }
  for (std::size_t i = 0; i < doc.morph.size(); ++i) {
    try {
      MorphFeatures::parse(doc.morph[i].value);
    } catch (const ValidationError& e) {
      fail("morph value canonical: " + describe("morph", i, doc.morph[i].span) + ": " + e.what());
    }
  }
  for (std::size_t i = 0; i < doc.dependencies.size(); ++i) {
    const Dependency& d = doc.dependencies[i];
    if (d.governor >= doc.tokens.size() || d.dependent >= doc.tokens.size()) {
      fail("dependency references existing tokens: " + describe("dependency", i, d.span));
    }
    if (d.governor == d.dependent && !is_root_dependency_type(d.type)) {
      fail("governor differs from dependent unless root: " + describe("dependency", i, d.span));
    }
  }
  for (std::size_t i = 0; i < doc.entities.size(); ++i) {
    if (doc.entities[i].label.empty()) fail("entity label non-empty: " + describe("entity", i, doc.entities[i].span));
  }

  if (doc.metadata) {
    const auto& m = *doc.metadata;
    using namespace std::chrono;
    const year_month_day ymd{year{m.year}, month{static_cast<unsigned>(m.month)},
                             day{static_cast<unsigned>(m.day)}};
    if (m.month < 1 || m.month > 12 || m.day < 1 || m.day > 31 || !ymd.ok()) {
      fail("session date is a valid calendar date");
    }
    const auto ms = duration_cast<milliseconds>(sys_days{ymd}.time_since_epoch()).count();
    if (ms != m.timestamp_ms) fail("timestamp equals UTC midnight of the session date");
    if (m.title != doc.document_meta.document_title) fail("session title equals documentTitle");
  }
  const auto& dm = doc.document_meta;
  if (!dm.document_uri.empty() && !dm.document_base_uri.empty() &&
      dm.document_uri.rfind(dm.document_base_uri, 0) != 0) {
    fail("documentUri starts with documentBaseUri");
  }
}

}  // namespace parlagest
