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

#include <random>

#include "parlagest/annotate.hpp"
#include "parlagest/error.hpp"
#include "parlagest/gzip.hpp"
#include "parlagest/process.hpp"
#include "parlagest/xmi.hpp"
#include "support.hpp"

namespace {

using namespace parlagest;
namespace ts = testsupport;

std::string minimal_xmi(const std::string& body, const std::string& sofa) {
  return std::string("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<xmi:XMI xmlns:xmi=\"") + xmi::ns::kXmi +
         "\" xmlns:cas=\"" + xmi::ns::kCas + "\" xmlns:type6=\"" + xmi::ns::kSegmentation + "\" xmlns:morph=\"" +
         xmi::ns::kMorph + "\" xmi:version=\"2.0\">\n" + body + "<cas:Sofa xmi:id=\"1\" sofaNum=\"1\" sofaID=\"_InitialView\" " +
         "mimeType=\"text\" sofaString=\"" + sofa + "\"/>\n</xmi:XMI>\n";
}

XmiError::Kind error_kind(const std::string& xml) {
  try {
    xmi::from_xmi(xml);
  } catch (const XmiError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << xml;
  return XmiError::Kind::schema;
}

TEST(Xmi, TokenReferencesItsLemma) {
  const auto xml = xmi::to_xmi(ts::session_opening_document());
  EXPECT_NE(xml.find("<type6:Token xmi:id=\"21\" sofa=\"1\" begin=\"2733\" end=\"2748\" lemma=\"5\" pos=\"37\""),
            std::string::npos);
  EXPECT_NE(xml.find("<type6:Lemma xmi:id=\"5\" sofa=\"1\" begin=\"2733\" end=\"2748\" value=\"Alterspräsident\"/>"),
            std::string::npos);
  EXPECT_NE(xml.find("<dependency:Dependency xmi:id=\"55\" sofa=\"1\" begin=\"2733\" end=\"2748\" Governor=\"23\" "
                     "Dependent=\"21\" DependencyType=\"PNC\" flavor=\"basic\"/>"),
            std::string::npos);
}

TEST(Xmi, FixtureRoundTrips) {
  const auto doc = ts::session_opening_document();
  EXPECT_EQ(xmi::from_xmi(xmi::to_xmi(doc)), doc);
}

TEST(Xmi, TwoSentenceDocumentRoundTrips) {
  auto doc = build_document("zwei", "Meine Damen und Herren! Wir beginnen.");
  ASSERT_EQ(doc.sentences.size(), 2u);
  EXPECT_EQ(xmi::from_xmi(xmi::to_xmi(doc)), doc);
}

TEST(Xmi, EmptyDocument) {
  AnnotatedDocument doc;
  doc.document_id = "empty";
  const auto xml = xmi::to_xmi(doc);
  EXPECT_EQ(xml.find("type6:"), std::string::npos);
  EXPECT_EQ(xmi::from_xmi(xml), doc);
}

TEST(Xmi, RandomDocumentsRoundTripThroughFiles) {
  TempDir tmp;
  std::mt19937 rng(99);
  for (int i = 0; i < 100; ++i) {
    auto doc = ts::random_document(rng);
    doc.document_id = "r" + std::to_string(i);
    const auto path = xmi::write_xmi(doc, tmp.path(), i % 2 == 0);
    EXPECT_EQ(path.filename().string(), xmi::file_name(doc.document_id, i % 2 == 0));
    EXPECT_EQ(gzip::is_gzip(ts::read_file(path)), i % 2 == 0);
    EXPECT_EQ(xmi::read_xmi(path), doc);
  }
}

TEST(Xmi, OutputIsDeterministic) {
  TempDir tmp;
  const auto doc = ts::session_opening_document();
  const auto a = ts::read_file(xmi::write_xmi(doc, tmp.path() / "a"));
  const auto b = ts::read_file(xmi::write_xmi(doc, tmp.path() / "b"));
  EXPECT_EQ(a, b);
}

TEST(Xmi, WriteRefusesInvalidDocuments) {
  auto doc = ts::session_opening_document();
  doc.tokens[3].lemma = 99;
  try {
    xmi::to_xmi(doc);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("lemma"), std::string::npos) << e.what();
  }
  doc = ts::session_opening_document();
  doc.metadata->timestamp_ms += 1;
  EXPECT_THROW(xmi::to_xmi(doc), ValidationError);
  doc = ts::session_opening_document();
  doc.lemmas[0].span.end = 48635;
  EXPECT_THROW(xmi::to_xmi(doc), ValidationError);
}

TEST(Xmi, MorphologyFragment) {
  const auto doc = xmi::from_xmi(minimal_xmi(
      "<morph:MorphologicalFeatures xmi:id=\"7\" sofa=\"1\" begin=\"0\" end=\"8\" gender=\"Masc\" number=\"Sing\" "
      "case=\"Nom\" value=\"Case=Nom|Gender=Masc|Number=Sing\"/>\n"
      "<type6:Token xmi:id=\"8\" sofa=\"1\" begin=\"0\" end=\"8\" morph=\"7\"/>\n",
      "Winfried"));
  ASSERT_EQ(doc.morph.size(), 1u);
  EXPECT_EQ(doc.morph[0].grammatical_case(), "Nom");
  EXPECT_EQ(doc.morph[0].gender(), "Masc");
  EXPECT_EQ(doc.morph[0].number(), "Sing");
  EXPECT_EQ(doc.tokens[0].morph, 0u);
}

TEST(Xmi, ReadErrors) {
  EXPECT_EQ(error_kind(minimal_xmi("<type6:Token xmi:id=\"8\" sofa=\"1\" begin=\"0\" end=\"3\" lemma=\"999\"/>\n", "abc")),
            XmiError::Kind::dangling_reference);
  EXPECT_EQ(error_kind(minimal_xmi("<type6:Token xmi:id=\"8\" sofa=\"1\" begin=\"0\" end=\"4\"/>\n", "abc")),
            XmiError::Kind::offset_out_of_range);
  EXPECT_EQ(error_kind("<xmi:XMI><unclosed>"), XmiError::Kind::malformed);
  EXPECT_EQ(error_kind(std::string("<?xml version=\"1.0\"?><root xmlns:xmi=\"") + xmi::ns::kXmi + "\"/>"),
            XmiError::Kind::schema);
  EXPECT_EQ(error_kind(minimal_xmi("<cas:Sofa xmi:id=\"2\" sofaNum=\"2\" sofaString=\"y\"/>\n", "x")),
            XmiError::Kind::schema);
}

TEST(Gzip, RoundTripAndCorruption) {
  std::mt19937 rng(4);
  for (int i = 0; i < 20; ++i) {
    std::string data(std::uniform_int_distribution<int>(0, 5000)(rng), '\0');
    for (auto& c : data) c = static_cast<char>(rng() % 7);
    const auto packed = gzip::compress(data);
    EXPECT_TRUE(gzip::is_gzip(packed));
    EXPECT_EQ(gzip::decompress(packed), data);
  }
  auto packed = gzip::compress(std::string(1000, 'a'));
  packed.resize(packed.size() - 6);
  EXPECT_THROW(gzip::decompress(packed), Error);
}

TEST(Xmi, OutputDirectoryLayout) {
  EXPECT_EQ(xmi::output_dir("/o", "Bayern", 17), std::filesystem::path("/o/Bayern/xmi/17"));
  EXPECT_EQ(xmi::output_dir("/o", "Bayern", std::nullopt), std::filesystem::path("/o/Bayern/xmi"));
}

}  // namespace
