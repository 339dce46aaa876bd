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

#include "parlagest/xmi.hpp"

#include <expat.h>

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "parlagest/error.hpp"
#include "parlagest/gzip.hpp"
#include "parlagest/unicode.hpp"

namespace parlagest::xmi {

namespace fs = std::filesystem;

namespace {

void escape_into(std::string& out, std::string_view s) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\t': out += "&#9;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      default: out.push_back(c);
    }
  }
}

class Element {
 public:
  Element(std::string& out, std::string_view qname) : out_(out) {
    out_ += '<';
    out_ += qname;
  }
  Element& attr(std::string_view name, std::string_view value) {
    out_ += ' ';
    out_ += name;
    out_ += "=\"";
    escape_into(out_, value);
    out_ += '"';
    return *this;
  }
  Element& attr(std::string_view name, std::int64_t value) { return attr(name, std::to_string(value)); }
  Element& attr(std::string_view name, std::size_t value) { return attr(name, std::to_string(value)); }
  Element& attr(std::string_view name, int value) { return attr(name, std::to_string(value)); }
  Element& span(Span s) { return attr("sofa", "1").attr("begin", s.begin).attr("end", s.end); }
  ~Element() { out_ += "/>\n"; }

 private:
  std::string& out_;
};

}  // namespace

std::string to_xmi(const AnnotatedDocument& doc) {
  validate(doc);

  // Ids: 1 is the sofa, the rest count up in emission order.
  std::size_t next = 2;
  auto block = [&next](std::size_t n) {
    const std::size_t first = next;
    next += n;
    return first;
  };
  const std::size_t id_doc_annotation = doc.metadata ? block(1) : 0;
  const std::size_t id_meta = block(1);
  const std::size_t id_sentences = block(doc.sentences.size());
  const std::size_t id_lemmas = block(doc.lemmas.size());
  const std::size_t id_tokens = block(doc.tokens.size());
  const std::size_t id_pos = block(doc.pos_tags.size());
  const std::size_t id_morph = block(doc.morph.size());
  const std::size_t id_deps = block(doc.dependencies.size());
  const std::size_t id_entities = block(doc.entities.size());
  const std::size_t id_provenance = block(1);
  const std::size_t last_id = next;

  std::string out;
  out.reserve(doc.sofa.size() * 2 + doc.tokens.size() * 160 + 2048);
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<xmi:XMI";
  const std::pair<const char*, const char*> prefixes[] = {
      {"xmi", ns::kXmi},         {"cas", ns::kCas},     {"type4", ns::kMetadata},
      {"type6", ns::kSegmentation}, {"pos", ns::kPos},  {"morph", ns::kMorph},
      {"dependency", ns::kDependency}, {"ner", ns::kNer}, {"annotation2", ns::kAnnotation},
      {"parlagest", ns::kParlagest},
  };
  for (const auto& [prefix, uri] : prefixes) {
    out += " xmlns:";
    out += prefix;
    out += "=\"";
    out += uri;
    out += '"';
  }
  out += " xmi:version=\"2.0\">\n";
  Element(out, "cas:NULL").attr("xmi:id", 0);

  if (doc.metadata) {
    const auto& m = *doc.metadata;
    Element(out, "annotation2:DocumentAnnotation")
        .attr("xmi:id", id_doc_annotation)
        .attr("sofa", "1")
        .attr("dateDay", m.day)
        .attr("subtitle", m.subtitle)
        .attr("dateMonth", m.month)
        .attr("dateYear", m.year)
        .attr("timestamp", m.timestamp_ms);
  }
  const auto& dm = doc.document_meta;
  Element(out, "type4:DocumentMetaData")
      .attr("xmi:id", id_meta)
      .span(Span{0, doc.length()})
      .attr("language", dm.language)
      .attr("documentTitle", dm.document_title)
      .attr("documentId", dm.document_id)
      .attr("documentUri", dm.document_uri)
      .attr("documentBaseUri", dm.document_base_uri)
      .attr("isLastSegment", dm.is_last_segment ? "true" : "false");

  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    Element(out, "type6:Sentence").attr("xmi:id", id_sentences + i).span(doc.sentences[i]);
  }
  for (std::size_t i = 0; i < doc.lemmas.size(); ++i) {
    Element(out, "type6:Lemma").attr("xmi:id", id_lemmas + i).span(doc.lemmas[i].span).attr("value", doc.lemmas[i].value);
  }
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const Token& t = doc.tokens[i];
    Element e(out, "type6:Token");
    e.attr("xmi:id", id_tokens + i).span(t.span);
    if (t.lemma) e.attr("lemma", id_lemmas + *t.lemma);
    if (t.pos) e.attr("pos", id_pos + *t.pos);
    if (t.morph) e.attr("morph", id_morph + *t.morph);
    e.attr("order", t.order);
  }
  for (std::size_t i = 0; i < doc.pos_tags.size(); ++i) {
    Element(out, "pos:POS").attr("xmi:id", id_pos + i).span(doc.pos_tags[i].span).attr("PosValue", doc.pos_tags[i].value);
  }
  for (std::size_t i = 0; i < doc.morph.size(); ++i) {
    const MorphFeatures& m = doc.morph[i];
    Element e(out, "morph:MorphologicalFeatures");
    e.attr("xmi:id", id_morph + i).span(m.span);
    if (auto g = m.gender()) e.attr("gender", *g);
    if (auto n = m.number()) e.attr("number", *n);
    if (auto c = m.grammatical_case()) e.attr("case", *c);
    e.attr("value", m.value);
  }
  for (std::size_t i = 0; i < doc.dependencies.size(); ++i) {
    const Dependency& d = doc.dependencies[i];
    Element(out, "dependency:Dependency")
        .attr("xmi:id", id_deps + i)
        .span(d.span)
        .attr("Governor", id_tokens + d.governor)
        .attr("Dependent", id_tokens + d.dependent)
        .attr("DependencyType", d.type)
        .attr("flavor", d.flavor);
  }
  for (std::size_t i = 0; i < doc.entities.size(); ++i) {
    Element(out, "ner:NamedEntity").attr("xmi:id", id_entities + i).span(doc.entities[i].span).attr("value", doc.entities[i].label);
  }
  Element(out, "parlagest:Provenance")
      .attr("xmi:id", id_provenance)
      .attr("sofa", "1")
      .attr("documentId", doc.document_id)
      .attr("parliament", doc.parliament)
      .attr("provenance", to_string(doc.provenance))
      .attr("script", to_string(doc.script))
      .attr("metadataMissing", doc.metadata ? "false" : "true")
      .attr("annotator", doc.annotation_note);
  Element(out, "cas:Sofa")
      .attr("xmi:id", 1)
      .attr("sofaNum", 1)
      .attr("sofaID", "_InitialView")
      .attr("mimeType", "text")
      .attr("sofaString", doc.sofa);

  out += "<cas:View sofa=\"1\" members=\"";
  for (std::size_t id = 2; id < last_id; ++id) {
    if (id > 2) out += ' ';
    out += std::to_string(id);
  }
  out += "\"/>\n</xmi:XMI>\n";
  return out;
}

namespace {

constexpr char kSep = '|';

struct RawElement {
  std::string uri;
  std::string local;
  std::map<std::string, std::string, std::less<>> attrs;
  int line = 0;
};

struct ParseState {
  XML_Parser parser;
  int depth = 0;
  bool root_ok = false;
  std::vector<RawElement> elements;
};

std::pair<std::string, std::string> split_name(const char* name) {
  std::string_view n(name);
  const auto sep = n.rfind(kSep);
  if (sep == std::string_view::npos) return {"", std::string(n)};
  return {std::string(n.substr(0, sep)), std::string(n.substr(sep + 1))};
}

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** atts) {
  auto* st = static_cast<ParseState*>(data);
  ++st->depth;
  auto [uri, local] = split_name(name);
  if (st->depth == 1) {
    st->root_ok = uri == ns::kXmi && local == "XMI";
    return;
  }
  if (st->depth != 2) return;
  RawElement e{std::move(uri), std::move(local), {}, static_cast<int>(XML_GetCurrentLineNumber(st->parser))};
  for (int i = 0; atts[i]; i += 2) {
    auto [auri, alocal] = split_name(atts[i]);
    e.attrs[auri == ns::kXmi ? "xmi:" + alocal : alocal] = atts[i + 1];
  }
  st->elements.push_back(std::move(e));
}

void XMLCALL on_end(void* data, const XML_Char*) { --static_cast<ParseState*>(data)->depth; }

[[noreturn]] void fail(XmiError::Kind kind, const RawElement* e, const std::string& what) {
  std::string msg = what;
  if (e) msg = "line " + std::to_string(e->line) + ": " + e->local + ": " + what;
  throw XmiError(kind, msg);
}

const std::string* find_attr(const RawElement& e, std::string_view name) {
  auto it = e.attrs.find(name);
  return it == e.attrs.end() ? nullptr : &it->second;
}

std::string attr_or(const RawElement& e, std::string_view name, std::string fallback = {}) {
  const auto* v = find_attr(e, name);
  return v ? *v : fallback;
}

template <typename T>
T number(const RawElement& e, std::string_view name) {
  const auto* v = find_attr(e, name);
  if (!v) fail(XmiError::Kind::schema, &e, "missing attribute " + std::string(name));
  T out{};
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    fail(XmiError::Kind::schema, &e, "attribute " + std::string(name) + " is not a number: '" + *v + "'");
  }
  return out;
}

Span span_of(const RawElement& e, std::size_t len) {
  const auto begin = number<std::size_t>(e, "begin");
  const auto end = number<std::size_t>(e, "end");
  if (begin > end || end > len) {
    fail(XmiError::Kind::offset_out_of_range, &e,
         "span [" + std::to_string(begin) + "," + std::to_string(end) + ") outside sofa of length " +
             std::to_string(len));
  }
  return Span{begin, end};
}

}  // namespace

AnnotatedDocument from_xmi(std::string_view xml) {
  ParseState st;
  st.parser = XML_ParserCreateNS("UTF-8", kSep);
  if (!st.parser) throw XmiError(XmiError::Kind::malformed, "cannot create XML parser");
  XML_SetUserData(st.parser, &st);
  XML_SetElementHandler(st.parser, on_start, on_end);
  const bool ok = XML_Parse(st.parser, xml.data(), static_cast<int>(xml.size()), XML_TRUE) == XML_STATUS_OK;
  std::string error;
  if (!ok) {
    error = "line " + std::to_string(XML_GetCurrentLineNumber(st.parser)) + ": " +
            XML_ErrorString(XML_GetErrorCode(st.parser));
  }
  XML_ParserFree(st.parser);
  if (!ok) throw XmiError(XmiError::Kind::malformed, "malformed XML: " + error);
  if (!st.root_ok) throw XmiError(XmiError::Kind::schema, "root element is not xmi:XMI");

  AnnotatedDocument doc;
  const RawElement* sofa = nullptr;
  for (const auto& e : st.elements) {
    if (e.uri == ns::kCas && e.local == "Sofa") {
      if (sofa) fail(XmiError::Kind::schema, &e, "more than one sofa");
      sofa = &e;
    }
  }
  if (!sofa) throw XmiError(XmiError::Kind::schema, "no cas:Sofa element");
  doc.sofa = attr_or(*sofa, "sofaString");
  const std::size_t len = unicode::length(doc.sofa);

  struct PendingToken {
    const RawElement* element;
    std::optional<std::size_t> lemma, pos, morph;
  };
  std::unordered_map<std::size_t, std::size_t> lemma_ids, pos_ids, morph_ids, token_ids;
  std::vector<PendingToken> pending_tokens;
  std::vector<const RawElement*> pending_deps;
  const RawElement* provenance = nullptr;
  const RawElement* doc_annotation = nullptr;
  const RawElement* meta = nullptr;

  auto id_of = [](const RawElement& e) { return number<std::size_t>(e, "xmi:id"); };
  auto optional_id = [](const RawElement& e, std::string_view name) -> std::optional<std::size_t> {
    if (!find_attr(e, name)) return std::nullopt;
    return number<std::size_t>(e, name);
  };

  for (const auto& e : st.elements) {
    if (e.uri == ns::kSegmentation && e.local == "Sentence") {
      doc.sentences.push_back(span_of(e, len));
    } else if (e.uri == ns::kSegmentation && e.local == "Lemma") {
      lemma_ids[id_of(e)] = doc.lemmas.size();
      doc.lemmas.push_back(Lemma{span_of(e, len), attr_or(e, "value")});
    } else if (e.uri == ns::kPos && e.local == "POS") {
      pos_ids[id_of(e)] = doc.pos_tags.size();
      doc.pos_tags.push_back(PosTag{span_of(e, len), attr_or(e, "PosValue")});
    } else if (e.uri == ns::kMorph && e.local == "MorphologicalFeatures") {
      morph_ids[id_of(e)] = doc.morph.size();
      MorphFeatures m{span_of(e, len), attr_or(e, "value")};
      if (!find_attr(e, "value")) {
        MorphFeatures::Features f;
        if (auto* c = find_attr(e, "case")) f.emplace_back("Case", *c);
        if (auto* g = find_attr(e, "gender")) f.emplace_back("Gender", *g);
        if (auto* n = find_attr(e, "number")) f.emplace_back("Number", *n);
        m.value = MorphFeatures::join(f);
      }
      doc.morph.push_back(std::move(m));
    } else if (e.uri == ns::kSegmentation && e.local == "Token") {
      token_ids[id_of(e)] = pending_tokens.size();
      pending_tokens.push_back({&e, optional_id(e, "lemma"), optional_id(e, "pos"), optional_id(e, "morph")});
    } else if (e.uri == ns::kDependency && e.local == "Dependency") {
      pending_deps.push_back(&e);
    } else if (e.uri == ns::kNer && e.local == "NamedEntity") {
      doc.entities.push_back(NamedEntity{span_of(e, len), attr_or(e, "value")});
    } else if (e.uri == ns::kParlagest && e.local == "Provenance") {
      provenance = &e;
    } else if (e.uri == ns::kAnnotation && e.local == "DocumentAnnotation") {
      doc_annotation = &e;
    } else if (e.uri == ns::kMetadata && e.local == "DocumentMetaData") {
      meta = &e;
    }
  }

  auto resolve = [](const RawElement& e, std::optional<std::size_t> id,
                    const std::unordered_map<std::size_t, std::size_t>& ids,
                    const char* what) -> std::optional<std::size_t> {
    if (!id) return std::nullopt;
    auto it = ids.find(*id);
    if (it == ids.end()) {
      fail(XmiError::Kind::dangling_reference, &e, std::string(what) + "=\"" + std::to_string(*id) + "\" names no " + what);
    }
    return it->second;
  };
  for (const auto& p : pending_tokens) {
    Token t;
    t.span = span_of(*p.element, len);
    t.lemma = resolve(*p.element, p.lemma, lemma_ids, "lemma");
    t.pos = resolve(*p.element, p.pos, pos_ids, "pos");
    t.morph = resolve(*p.element, p.morph, morph_ids, "morph");
    t.order = find_attr(*p.element, "order") ? number<int>(*p.element, "order") : 0;
    doc.tokens.push_back(t);
  }
  for (const RawElement* e : pending_deps) {
    Dependency d;
    d.span = span_of(*e, len);
    d.governor = *resolve(*e, number<std::size_t>(*e, "Governor"), token_ids, "token");
    d.dependent = *resolve(*e, number<std::size_t>(*e, "Dependent"), token_ids, "token");
    d.type = attr_or(*e, "DependencyType");
    d.flavor = attr_or(*e, "flavor", "basic");
    doc.dependencies.push_back(std::move(d));
  }

  if (meta) {
    auto& dm = doc.document_meta;
    dm.language = attr_or(*meta, "language", "de");
    dm.document_title = attr_or(*meta, "documentTitle");
    dm.document_id = attr_or(*meta, "documentId");
    dm.document_uri = attr_or(*meta, "documentUri");
    dm.document_base_uri = attr_or(*meta, "documentBaseUri");
    dm.is_last_segment = attr_or(*meta, "isLastSegment") == "true";
  }
  if (doc_annotation) {
    SessionMetadata m;
    m.day = number<int>(*doc_annotation, "dateDay");
    m.month = number<int>(*doc_annotation, "dateMonth");
    m.year = number<int>(*doc_annotation, "dateYear");
    m.timestamp_ms = number<std::int64_t>(*doc_annotation, "timestamp");
    m.subtitle = attr_or(*doc_annotation, "subtitle");
    m.title = doc.document_meta.document_title;
    doc.metadata = m;
  }
  if (provenance) {
    doc.document_id = attr_or(*provenance, "documentId");
    doc.parliament = attr_or(*provenance, "parliament");
    doc.annotation_note = attr_or(*provenance, "annotator");
    const auto p = parse_provenance(attr_or(*provenance, "provenance", "native_text"));
    const auto s = parse_script(attr_or(*provenance, "script", "antiqua"));
    if (!p || !s) fail(XmiError::Kind::schema, provenance, "invalid provenance or script value");
    doc.provenance = *p;
    doc.script = *s;
  } else {
    std::string id = doc.document_meta.document_id;
    for (std::string_view ext : {".xmi.gz", ".xmi"}) {
      if (id.size() > ext.size() && id.ends_with(ext)) {
        id.erase(id.size() - ext.size());
        break;
      }
    }
    doc.document_id = id;
  }

  try {
    validate(doc);
  } catch (const ValidationError& e) {
    throw XmiError(XmiError::Kind::schema, e.what());
  }
  return doc;
}

std::string file_name(const std::string& document_id, bool gzip) {
  return document_id + (gzip ? ".xmi.gz" : ".xmi");
}

fs::path write_xmi(const AnnotatedDocument& doc, const fs::path& dir, bool gzip) {
  const std::string xml = to_xmi(doc);
  fs::create_directories(dir);
  const fs::path path = dir / file_name(doc.document_id, gzip);
  const fs::path part = path.string() + ".part";
  {
    std::ofstream out(part, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + part.string());
    if (gzip) {
      const std::string packed = gzip::compress(xml);
      out.write(packed.data(), static_cast<std::streamsize>(packed.size()));
    } else {
      out.write(xml.data(), static_cast<std::streamsize>(xml.size()));
    }
    if (!out) throw Error("cannot write " + part.string());
  }
  fs::rename(part, path);
  return path;
}

AnnotatedDocument read_xmi(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw XmiError(XmiError::Kind::malformed, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string data = buf.str();
  if (gzip::is_gzip(data)) {
    try {
      data = gzip::decompress(data);
    } catch (const Error& e) {
      throw XmiError(XmiError::Kind::malformed, path.string() + ": " + e.what());
    }
  }
  return from_xmi(data);
}

fs::path output_dir(const fs::path& out, const std::string& parliament, std::optional<int> legislature) {
  fs::path dir = out / parliament / "xmi";
  if (legislature) dir /= std::to_string(*legislature);
  return dir;
}

}  // namespace parlagest::xmi
