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

#include "parlagest/annotate.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "parlagest/digest.hpp"
#include "parlagest/error.hpp"
#include "parlagest/pdf.hpp"
#include "parlagest/unicode.hpp"

namespace parlagest {

namespace fs = std::filesystem;
using unicode::is_digit;
using unicode::is_letter;
using unicode::is_space;

namespace {

std::string lexicon_key(std::string_view word) {
  while (!word.empty() && word.back() == '.') word.remove_suffix(1);
  return unicode::to_lower(word);
}

bool is_alnum(char32_t c) { return is_letter(c) || is_digit(c); }

bool is_opening(char32_t c) {
  static constexpr std::u32string_view kOpen = U"([{\"'„“‚‘«»‹›";
  return kOpen.find(c) != std::u32string_view::npos;
}

bool is_closing(char32_t c) {
  static constexpr std::u32string_view kClose = U")]}\"'“”‘’«»‹›";
  return kClose.find(c) != std::u32string_view::npos;
}

bool is_terminal(char32_t c) { return c == U'.' || c == U'?' || c == U'!' || c == U'…'; }

Token token_at(std::size_t begin, std::size_t end) {
  Token t;
  t.span = Span{begin, end};
  return t;
}

}  // namespace

WordList WordList::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read word list " + path.string());
  WordList list;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t");
    list.add(std::string_view(line).substr(b, e - b + 1));
  }
  return list;
}

void WordList::add(std::string_view word) {
  auto key = lexicon_key(word);
  if (!key.empty()) words_.insert(std::move(key));
}

bool WordList::contains(std::string_view word) const { return words_.count(lexicon_key(word)) > 0; }

const WordList& WordList::default_abbreviations() {
  static const WordList list = load(data_file("abbreviations_de.txt"));
  return list;
}

const WordList& WordList::default_protected_names() {
  static const WordList list = load(data_file("hyphenated_names_de.txt"));
  return list;
}

std::string normalize_text(std::string_view raw) {
  std::string crlf;
  crlf.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\r' && i + 1 < raw.size() && raw[i + 1] == '\n') continue;
    crlf.push_back(raw[i]);
  }
  std::u32string kept;
  for (char32_t c : unicode::decode(crlf)) {
    if (c == U'\n' || c == U'\f' || !unicode::is_control(c)) kept.push_back(c);
  }
  return unicode::to_nfc(unicode::encode(kept));
}

std::string dehyphenate(std::string_view text, const WordList& protected_names) {
  const std::u32string in = unicode::decode(text);
  std::u32string out;
  out.reserve(in.size());
  const std::size_t n = in.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (in[i] == U'-' && i > 0 && i + 2 < n && in[i + 1] == U'\n' && is_letter(in[i - 1]) &&
        is_letter(in[i + 2])) {
      std::size_t left = i;
      while (left > 0 && (is_letter(in[left - 1]) || in[left - 1] == U'-')) --left;
      std::size_t right = i + 2;
      while (right < n && is_letter(in[right])) ++right;
      const std::u32string joined = in.substr(left, i - left) + U"-" + in.substr(i + 2, right - i - 2);
      if (unicode::is_upper(in[i + 2]) || protected_names.contains(unicode::encode(joined))) {
        out.push_back(U'-');
      }
      ++i;  // drop the line break
      continue;
    }
    out.push_back(in[i]);
  }
  return unicode::encode(out);
}

std::string extract_native_text(DocumentRecord& record, const WordList& protected_names) {
  if (record.classification != Classification::readable) {
    throw PreconditionError(record.id + ": native extraction requires a readable document");
  }
  std::string text;
  try {
    const auto doc = pdf::Document::open(record.local_path);
    for (int p = 0; p < doc.page_count(); ++p) {
      if (p) text.push_back('\f');
      text += pdf::extract_page_text(doc, p);
    }
  } catch (const std::exception& e) {
    throw ExtractionError(record.id, e.what());
  }
  advance_state(record, DocumentState::extracted);
  return dehyphenate(text, protected_names);
}

namespace {

class Segmenter {
 public:
  Segmenter(std::u32string_view text, const WordList& abbreviations) : t_(text), abbr_(abbreviations) {}

  Segmentation run() {
    Segmentation out;
    std::size_t i = 0;
    while (i < t_.size()) {
      while (i < t_.size() && is_space(t_[i])) ++i;
      std::size_t j = i;
      while (j < t_.size() && !is_space(t_[j])) ++j;
      if (j > i) split_chunk(i, j, out.tokens);
      i = j;
    }
    out.sentences = sentences(out.tokens);
    return out;
  }

 private:
  bool keeps_period(std::size_t a, std::size_t dot) const {
    if (dot == a) return false;
    const std::u32string_view core = t_.substr(a, dot - a);
    if (std::all_of(core.begin(), core.end(), is_digit)) return core.size() <= 3;
    if (abbr_.contains(unicode::encode(core))) return true;
    // Forms like "z.B" or "d.h": letters with internal periods.
    bool has_dot = false;
    for (std::size_t k = 0; k < core.size(); ++k) {
      if (core[k] == U'.') {
        if (k == 0 || core[k - 1] == U'.') return false;
        has_dot = true;
      } else if (!is_letter(core[k])) {
        return false;
      }
    }
    return has_dot;
  }

  void split_chunk(std::size_t a, std::size_t e, std::vector<Token>& tokens) const {
    while (a < e && !is_alnum(t_[a])) {
      tokens.push_back(token_at(a, a + 1));
      ++a;
    }
    std::vector<Token> trailing;
    while (e > a && !is_alnum(t_[e - 1])) {
      if (t_[e - 1] == U'.' && keeps_period(a, e - 1)) break;
      trailing.push_back(token_at(e - 1, e));
      --e;
    }
    if (e > a) tokens.push_back(token_at(a, e));
    tokens.insert(tokens.end(), trailing.rbegin(), trailing.rend());
  }

  bool hard_break(std::size_t from, std::size_t to) const {
    int newlines = 0;
    for (std::size_t k = from; k < to; ++k) {
      if (t_[k] == U'\f') return true;
      if (t_[k] == U'\n' && ++newlines == 2) return true;
    }
    return false;
  }

  bool single(const Token& tok, bool (*pred)(char32_t)) const {
    return tok.span.size() == 1 && pred(t_[tok.span.begin]);
  }

  std::vector<Span> sentences(const std::vector<Token>& tokens) const {
    std::vector<Span> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      bool boundary = i + 1 == tokens.size();
      std::size_t last = i;
      if (!boundary && single(tokens[i], is_terminal)) {
        while (last + 1 < tokens.size() && tokens[last + 1].span.begin == tokens[last].span.end &&
               (single(tokens[last + 1], is_closing) || single(tokens[last + 1], is_terminal))) {
          ++last;
        }
        if (last + 1 == tokens.size()) {
          boundary = true;
        } else if (tokens[last + 1].span.begin > tokens[last].span.end) {
          const char32_t next = t_[tokens[last + 1].span.begin];
          boundary = unicode::is_upper(next) || is_opening(next);
        }
        if (!boundary) last = i;
      }
      if (!boundary && hard_break(tokens[i].span.end, tokens[i + 1].span.begin)) boundary = true;
      if (boundary) {
        out.push_back(Span{tokens[start].span.begin, tokens[last].span.end});
        i = last;
        start = last + 1;
      }
    }
    return out;
  }

  std::u32string_view t_;
  const WordList& abbr_;
};

}  // namespace

Segmentation segment(std::string_view text, const WordList& abbreviations) {
  const std::u32string decoded = unicode::decode(text);
  return Segmenter(decoded, abbreviations).run();
}

AnnotatedDocument build_document(std::string document_id, std::string_view normalized_text,
                                 const WordList& abbreviations) {
  AnnotatedDocument doc;
  doc.document_id = std::move(document_id);
  doc.sofa = to_sofa(normalized_text);
  auto seg = segment(normalized_text, abbreviations);
  doc.sentences = std::move(seg.sentences);
  doc.tokens = std::move(seg.tokens);
  return doc;
}

namespace {

using nlohmann::json;

[[noreturn]] void reject(const std::string& what) { throw PayloadError(what); }

Span span_at(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("begin") || !j.contains("end") || !j["begin"].is_number_unsigned() ||
      !j["end"].is_number_unsigned()) {
    if (j.is_object() && j.contains("begin") && j["begin"].is_number_integer() && j["begin"].get<long long>() < 0) {
      reject(where + ": negative offset");
    }
    reject(where + ": expected non-negative integer begin and end");
  }
  return Span{j["begin"].get<std::size_t>(), j["end"].get<std::size_t>()};
}

Span pair_at(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_unsigned() || !j[1].is_number_unsigned()) {
    reject(where + ": expected [begin, end]");
  }
  return Span{j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

std::string string_at(const json& j, const char* key, const std::string& where, bool required = true) {
  if (!j.contains(key)) {
    if (required) reject(where + ": missing '" + key + "'");
    return {};
  }
  if (!j[key].is_string()) reject(where + ": '" + key + "' must be a string");
  return j[key].get<std::string>();
}

template <typename T, typename Fn>
std::optional<std::vector<T>> layer(const json& layers, const char* name, Fn&& make) {
  if (!layers.contains(name)) return std::nullopt;
  const json& arr = layers[name];
  if (!arr.is_array()) reject(std::string("layers.") + name + " must be an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(make(arr[i], std::string("layers.") + name + "[" + std::to_string(i) + "]"));
  }
  return out;
}

}  // namespace

SidecarPayload parse_payload(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    reject(std::string("malformed payload JSON: ") + e.what());
  }
  if (!j.is_object()) reject("payload must be a JSON object");
  SidecarPayload p;
  p.document_id = string_at(j, "document_id", "payload");
  p.sofa_sha256 = string_at(j, "sofa_sha256", "payload");
  if (!j.contains("layers")) return p;
  const json& layers = j["layers"];
  if (!layers.is_object()) reject("payload.layers must be an object");

  p.sentences = layer<Span>(layers, "sentences", span_at);
  p.tokens = layer<Span>(layers, "tokens", span_at);
  p.lemmas = layer<Lemma>(layers, "lemmas", [](const json& e, const std::string& w) {
    return Lemma{span_at(e, w), string_at(e, "value", w)};
  });
  p.pos = layer<PosTag>(layers, "pos", [](const json& e, const std::string& w) {
    return PosTag{span_at(e, w), string_at(e, "value", w)};
  });
  p.morph = layer<MorphFeatures>(layers, "morph", [](const json& e, const std::string& w) {
    MorphFeatures::Features features;
    if (e.contains("features")) {
      if (!e["features"].is_object()) reject(w + ": 'features' must be an object");
      for (const auto& [k, v] : e["features"].items()) {
        if (!v.is_string()) reject(w + ": feature '" + k + "' must be a string");
        features.emplace_back(k, v.get<std::string>());
      }
    }
    MorphFeatures m{span_at(e, w), string_at(e, "value", w, false)};
    if (!e.contains("value")) {
      m.value = MorphFeatures::join(features);
      return m;
    }
    MorphFeatures::Features parsed;
    try {
      parsed = MorphFeatures::parse(m.value);
    } catch (const ValidationError& ex) {
      reject(w + ": " + ex.what());
    }
    for (const auto& f : features) {
      if (std::find(parsed.begin(), parsed.end(), f) == parsed.end()) {
        reject(w + ": feature " + f.first + "=" + f.second + " disagrees with value '" + m.value + "'");
      }
    }
    return m;
  });
  p.dependencies = layer<SidecarPayload::DependencyArc>(layers, "dependencies", [](const json& e, const std::string& w) {
    SidecarPayload::DependencyArc d;
    d.span = span_at(e, w);
    if (!e.contains("governor") || !e.contains("dependent")) reject(w + ": missing governor or dependent");
    d.governor = pair_at(e["governor"], w + ".governor");
    d.dependent = pair_at(e["dependent"], w + ".dependent");
    d.type = string_at(e, "type", w);
    if (e.contains("flavor")) d.flavor = string_at(e, "flavor", w);
    return d;
  });
  p.entities = layer<NamedEntity>(layers, "entities", [](const json& e, const std::string& w) {
    return NamedEntity{span_at(e, w), string_at(e, "label", w)};
  });
  return p;
}

SidecarPayload load_payload(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PayloadError("cannot read payload " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_payload(buf.str());
}

namespace {

void check_range(Span s, std::size_t len, const std::string& where) {
  if (s.begin > s.end || s.end > len) {
    reject(where + " [" + std::to_string(s.begin) + "," + std::to_string(s.end) + ") is outside the sofa of length " +
           std::to_string(len));
  }
}

template <typename T>
void check_layer(const std::optional<std::vector<T>>& items, const char* name, std::size_t len) {
  if (!items) return;
  for (std::size_t i = 0; i < items->size(); ++i) {
    const T& item = (*items)[i];
    const std::string where = std::string("layers.") + name + "[" + std::to_string(i) + "]";
    if constexpr (std::is_same_v<T, Span>) {
      check_range(item, len, where);
    } else {
      check_range(item.span, len, where);
    }
    if constexpr (std::is_same_v<T, SidecarPayload::DependencyArc>) {
      check_range(item.governor, len, where + ".governor");
      check_range(item.dependent, len, where + ".dependent");
    }
  }
}

std::string span_text(Span s) { return "[" + std::to_string(s.begin) + "," + std::to_string(s.end) + ")"; }

}  // namespace

AnnotatedDocument attach_external_annotations(AnnotatedDocument doc, const SidecarPayload& payload,
                                              const AttachOptions& options) {
  if (payload.document_id != doc.document_id) {
    reject("payload document_id '" + payload.document_id + "' does not match '" + doc.document_id + "'");
  }
  std::string expected = sha256_hex(doc.sofa);
  std::string given = payload.sofa_sha256;
  std::transform(given.begin(), given.end(), given.begin(), [](unsigned char c) { return std::tolower(c); });
  if (given != expected) reject(doc.document_id + ": sofa_sha256 does not match the document sofa");

  const std::size_t len = doc.length();
  check_layer(payload.sentences, "sentences", len);
  check_layer(payload.tokens, "tokens", len);
  check_layer(payload.lemmas, "lemmas", len);
  check_layer(payload.pos, "pos", len);
  check_layer(payload.morph, "morph", len);
  check_layer(payload.dependencies, "dependencies", len);
  check_layer(payload.entities, "entities", len);

  // Existing arcs are carried by token span so they survive a token swap.
  std::vector<SidecarPayload::DependencyArc> arcs;
  if (payload.dependencies) {
    arcs = *payload.dependencies;
  } else {
    for (const auto& d : doc.dependencies) {
      arcs.push_back({d.span, doc.tokens.at(d.governor).span, doc.tokens.at(d.dependent).span, d.type, d.flavor});
    }
  }

  if (options.replace_segmentation) {
    if (payload.tokens) {
      doc.tokens.clear();
      for (Span s : *payload.tokens) {
        Token t;
        t.span = s;
        doc.tokens.push_back(t);
      }
      std::sort(doc.tokens.begin(), doc.tokens.end(),
                [](const Token& a, const Token& b) { return a.span < b.span; });
    }
    if (payload.sentences) doc.sentences = *payload.sentences;
  }
  if (payload.lemmas) doc.lemmas = *payload.lemmas;
  if (payload.pos) doc.pos_tags = *payload.pos;
  if (payload.morph) doc.morph = *payload.morph;
  if (payload.entities) doc.entities = *payload.entities;

  std::map<Span, std::size_t> by_span;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    doc.tokens[i].lemma.reset();
    doc.tokens[i].pos.reset();
    doc.tokens[i].morph.reset();
    by_span.emplace(doc.tokens[i].span, i);
  }
  auto token_for = [&](Span s, const std::string& what) {
    auto it = by_span.find(s);
    if (it == by_span.end()) reject(what + " " + span_text(s) + " matches no token");
    return it->second;
  };
  auto link = [&](auto& items, std::optional<std::size_t> Token::*ref, const char* what) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      Token& tok = doc.tokens[token_for(items[i].span, what)];
      if (tok.*ref) reject(std::string("two ") + what + " annotations for token " + span_text(tok.span));
      tok.*ref = i;
    }
  };
  link(doc.lemmas, &Token::lemma, "lemma");
  link(doc.pos_tags, &Token::pos, "pos");
  link(doc.morph, &Token::morph, "morph");

  doc.dependencies.clear();
  for (const auto& a : arcs) {
    doc.dependencies.push_back(Dependency{a.span, token_for(a.governor, "dependency governor"),
                                          token_for(a.dependent, "dependency dependent"), a.type, a.flavor});
  }
  doc.annotation_note = "sidecar";
  try {
    validate(doc);
  } catch (const ValidationError& e) {
    reject(doc.document_id + ": payload breaks a document invariant: " + e.what());
  }
  return doc;
}

}  // namespace parlagest
