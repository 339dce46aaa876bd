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

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <random>

#include "parlagest/annotate.hpp"
#include "parlagest/digest.hpp"
#include "parlagest/error.hpp"
#include "parlagest/process.hpp"
#include "parlagest/unicode.hpp"
#include "support.hpp"

namespace {

using namespace parlagest;
namespace ts = testsupport;
using nlohmann::json;

std::vector<std::string> token_texts(std::string_view text, const Segmentation& s) {
  const auto u = unicode::decode(text);
  std::vector<std::string> out;
  for (const auto& t : s.tokens) out.push_back(unicode::encode(u.substr(t.span.begin, t.span.size())));
  return out;
}

std::string random_prose(std::mt19937& rng, int words) {
  static const std::vector<std::string> pool = {
      "Dr.",  "Müller", "spricht", "über", "den", "Haushalt", "z.", "B.", "Abs.", "3", "(Beifall)", "„Zitat“",
      "17.",  "Mai",    "2021.",   "Ja!",  "Nein?", "-", "Bundes-\nregierung", "…", "usw.", "Straße,", "\n\n", "\f"};
  static const std::vector<std::string> seps = {" ", " ", "\n", "  "};
  std::string s;
  std::uniform_int_distribution<std::size_t> w(0, pool.size() - 1), sp(0, seps.size() - 1);
  for (int i = 0; i < words; ++i) {
    if (i) s += seps[sp(rng)];
    s += pool[w(rng)];
  }
  return s;
}

TEST(Normalize, Examples) {
  EXPECT_EQ(normalize_text("a\r\nb"), "a\nb");
  EXPECT_EQ(normalize_text("u\xCC\x88" "ber"), "über");
  EXPECT_EQ(normalize_text("Seite 1\fSeite 2\x07\x1b"), "Seite 1\fSeite 2");
  const std::string normal = "Präsidentin: Ich eröffne die Sitzung.\n";
  EXPECT_EQ(normalize_text(normal), normal);
}

TEST(Normalize, Idempotent) {
  std::mt19937 rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto once = normalize_text(random_prose(rng, 30) + "\r\n\x01u\xCC\x88");
    EXPECT_EQ(normalize_text(once), once);
  }
}

TEST(Dehyphenate, JoinsLowercaseContinuations) {
  EXPECT_EQ(dehyphenate("die Bundes-\nregierung hat"), "die Bundesregierung hat");
  EXPECT_EQ(dehyphenate("Nord-\nOst"), "Nord-Ost");
  EXPECT_EQ(dehyphenate("Baden-\nwürttemberg"), "Baden-württemberg") << "protected lookup ignores case";
  EXPECT_EQ(dehyphenate("Abs. 3 -\nneu"), "Abs. 3 -\nneu");
  EXPECT_EQ(dehyphenate("Ende-\n\nAnfang"), "Ende-\n\nAnfang");
}

TEST(Dehyphenate, ProtectedNamesKeepTheirHyphen) {
  WordList names;
  names.add("Sachsen-anhalt");
  EXPECT_EQ(dehyphenate("Sachsen-\nanhalt", names), "Sachsen-anhalt");
  EXPECT_EQ(dehyphenate("Sachsen-\nanhalt", WordList{}), "Sachsenanhalt");
}

TEST(WordList, CaseAndTrailingPeriod) {
  WordList w;
  w.add("Dr.");
  EXPECT_TRUE(w.contains("dr"));
  EXPECT_TRUE(w.contains("DR."));
  EXPECT_FALSE(w.contains("Drs"));
  EXPECT_TRUE(WordList::default_abbreviations().contains("usw."));
  EXPECT_TRUE(WordList::default_protected_names().contains("Baden-Württemberg"));
}

TEST(Segment, Examples) {
  auto s = segment("Meine Damen und Herren!");
  EXPECT_EQ(s.sentences.size(), 1u);
  EXPECT_EQ(token_texts("Meine Damen und Herren!", s),
            (std::vector<std::string>{"Meine", "Damen", "und", "Herren", "!"}));

  s = segment("Dr. Müller spricht.");
  ASSERT_EQ(s.sentences.size(), 1u);
  EXPECT_EQ(token_texts("Dr. Müller spricht.", s), (std::vector<std::string>{"Dr.", "Müller", "spricht", "."}));

  s = segment("");
  EXPECT_TRUE(s.sentences.empty());
  EXPECT_TRUE(s.tokens.empty());
}

TEST(Segment, AbbreviationsOrdinalsAndYears) {
  const std::string text = "Am 17. Mai tagte der Ausschuss, vgl. Abs. 3 der Vorlage. Das war 2021. Danach nicht mehr.";
  const auto s = segment(text);
  const auto toks = token_texts(text, s);
  EXPECT_EQ(toks[1], "17.");
  EXPECT_NE(std::find(toks.begin(), toks.end(), "vgl."), toks.end());
  ASSERT_EQ(s.sentences.size(), 3u);
}

TEST(Segment, ClosingQuotesStayWithTheSentence) {
  const std::string text = "Er sagte: „Nein!“ Dann ging er.";
  const auto s = segment(text);
  ASSERT_EQ(s.sentences.size(), 2u);
  EXPECT_EQ(s.sentences[0], (Span{0, 17}));
}

TEST(Segment, PageBreakEndsSentence) {
  const auto s = segment("ohne Punkt\fneue Seite");
  EXPECT_EQ(s.sentences.size(), 2u);
}

TEST(Segment, TokensReconstructTheText) {
  std::mt19937 rng(2);
  for (int i = 0; i < 300; ++i) {
    const std::string text = normalize_text(random_prose(rng, 40));
    const auto u = unicode::decode(text);
    const auto s = segment(text);
    std::size_t at = 0;
    std::u32string rebuilt;
    for (const auto& t : s.tokens) {
      ASSERT_LE(at, t.span.begin);
      const auto gap = u.substr(at, t.span.begin - at);
      for (char32_t c : gap) ASSERT_TRUE(c == U' ' || c == U'\n' || c == U'\f' || c == U'\t') << text;
      rebuilt += gap;
      ASSERT_GT(t.span.size(), 0u);
      rebuilt += u.substr(t.span.begin, t.span.size());
      at = t.span.end;
    }
    rebuilt += u.substr(at);
    EXPECT_EQ(rebuilt, u);
    for (const auto& sent : s.sentences) EXPECT_LE(sent.end, u.size());
  }
}

TEST(Segment, ShiftingByAPrefixShiftsEverySpan) {
  std::mt19937 rng(3);
  for (int i = 0; i < 200; ++i) {
    const std::string text = normalize_text(random_prose(rng, 25));
    const std::string prefix(std::uniform_int_distribution<int>(1, 5)(rng), ' ');
    const auto a = segment(text);
    const auto b = segment(prefix + text);
    ASSERT_EQ(a.tokens.size(), b.tokens.size());
    ASSERT_EQ(a.sentences.size(), b.sentences.size());
    const std::size_t k = prefix.size();
    for (std::size_t t = 0; t < a.tokens.size(); ++t) {
      EXPECT_EQ(b.tokens[t].span, (Span{a.tokens[t].span.begin + k, a.tokens[t].span.end + k}));
    }
    for (std::size_t t = 0; t < a.sentences.size(); ++t) {
      EXPECT_EQ(b.sentences[t], (Span{a.sentences[t].begin + k, a.sentences[t].end + k}));
    }
    EXPECT_EQ(segment(text).tokens, a.tokens) << "deterministic";
  }
}

TEST(NativeText, ExtractsAndDehyphenates) {
  TempDir tmp;
  const auto pdf = tmp.path() / "native.pdf";
  ts::write_text_pdf(pdf, {{"Sitzung des Landtags", "die Bundes-", "regierung antwortet"}, {"Seite zwei"}});
  auto rec = ts::record_for(pdf, "n");
  rec.format_hint = FormatHint::readable;
  auto scanned = rec;
  rec = classify_document(rec);
  const auto text = extract_native_text(rec);
  EXPECT_EQ(text, "Sitzung des Landtags\ndie Bundesregierung antwortet\fSeite zwei");
  EXPECT_EQ(rec.state, DocumentState::extracted);

  scanned.format_hint = FormatHint::scanned;
  scanned = classify_document(scanned);
  EXPECT_THROW(extract_native_text(scanned), PreconditionError);
}

AnnotatedDocument fixture_without_layers() {
  auto doc = ts::session_opening_document();
  doc.lemmas.clear();
  doc.pos_tags.clear();
  doc.morph.clear();
  doc.dependencies.clear();
  for (auto& t : doc.tokens) t.lemma = t.pos = t.morph = std::nullopt;
  return doc;
}

json payload_json(const AnnotatedDocument& doc) {
  return json{{"document_id", doc.document_id}, {"sofa_sha256", sha256_hex(doc.sofa)}, {"layers", json::object()}};
}

TEST(Sidecar, AttachesLemmaByExactSpan) {
  const auto doc = fixture_without_layers();
  auto j = payload_json(doc);
  j["layers"]["lemmas"] = json::array({{{"begin", 2782}, {"end", 2791}, {"value", "verehren"}}});
  j["layers"]["morph"] = json::array(
      {{{"begin", 2749}, {"end", 2757}, {"features", {{"Gender", "Masc"}, {"Number", "Sing"}}}}});
  j["layers"]["dependencies"] = json::array({{{"begin", 2733},
                                              {"end", 2748},
                                              {"governor", {2758, 2769}},
                                              {"dependent", {2733, 2748}},
                                              {"type", "PNC"}}});
  const auto out = attach_external_annotations(doc, parse_payload(j.dump()));
  ASSERT_EQ(out.lemmas.size(), 1u);
  EXPECT_EQ(out.lemmas[0].value, "verehren");
  EXPECT_EQ(out.tokens[6].lemma, 0u);
  EXPECT_EQ(out.text(out.tokens[6].span), "verehrten");
  ASSERT_EQ(out.morph.size(), 1u);
  EXPECT_EQ(out.morph[0].gender(), "Masc");
  EXPECT_EQ(out.tokens[1].morph, 0u);
  ASSERT_EQ(out.dependencies.size(), 1u);
  EXPECT_EQ(out.dependencies[0].governor, 2u);
  EXPECT_EQ(out.dependencies[0].dependent, 0u);
  EXPECT_EQ(out.annotation_note, "sidecar");
  EXPECT_NO_THROW(validate(out));
}

TEST(Sidecar, EmptyLayersOnlyAddTheNote) {
  const auto doc = fixture_without_layers();
  auto out = attach_external_annotations(doc, parse_payload(payload_json(doc).dump()));
  EXPECT_EQ(out.annotation_note, "sidecar");
  out.annotation_note = doc.annotation_note;
  EXPECT_EQ(out, doc);
}

TEST(Sidecar, Rejections) {
  const auto doc = fixture_without_layers();
  auto j = payload_json(doc);
  j["layers"]["lemmas"] = json::array({{{"begin", 2782}, {"end", 2791}, {"value", "verehren"}},
                                       {{"begin", 48630}, {"end", 48640}, {"value", "x"}}});
  try {
    attach_external_annotations(doc, parse_payload(j.dump()));
    FAIL();
  } catch (const PayloadError& e) {
    EXPECT_NE(std::string(e.what()).find("layers.lemmas[1]"), std::string::npos) << e.what();
  }

  j = payload_json(doc);
  j["layers"]["pos"] = json::array({{{"begin", 2782}, {"end", 2790}, {"value", "ADJA"}}});
  try {
    attach_external_annotations(doc, parse_payload(j.dump()));
    FAIL();
  } catch (const PayloadError& e) {
    EXPECT_NE(std::string(e.what()).find("matches no token"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("2782"), std::string::npos) << e.what();
  }

  j = payload_json(doc);
  j["sofa_sha256"] = std::string(64, '0');
  EXPECT_THROW(attach_external_annotations(doc, parse_payload(j.dump())), PayloadError);

  j = payload_json(doc);
  j["document_id"] = "someone-else";
  EXPECT_THROW(attach_external_annotations(doc, parse_payload(j.dump())), PayloadError);

  EXPECT_THROW(parse_payload("{not json"), PayloadError);
  EXPECT_THROW(parse_payload("{\"document_id\": 3}"), PayloadError);
}

TEST(Sidecar, ReplacingSegmentationKeepsInvariants) {
  const std::string text = "Meine Damen und Herren!";
  auto doc = build_document("d", text);
  auto j = payload_json(doc);
  j["layers"]["tokens"] = json::array({{{"begin", 0}, {"end", 11}}, {{"begin", 12}, {"end", 23}}});
  j["layers"]["sentences"] = json::array({{{"begin", 0}, {"end", 23}}});
  j["layers"]["lemmas"] = json::array({{{"begin", 0}, {"end", 11}, {"value", "mein Dame"}}});
  const auto out = attach_external_annotations(doc, parse_payload(j.dump()), AttachOptions{true});
  ASSERT_EQ(out.tokens.size(), 2u);
  EXPECT_EQ(out.tokens[0].lemma, 0u);
  EXPECT_NO_THROW(validate(out));
}

}  // namespace
