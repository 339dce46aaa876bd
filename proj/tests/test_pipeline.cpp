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

#include <sys/stat.h>

#include <nlohmann/json.hpp>

#include <sstream>

#include "parlagest/annotate.hpp"
#include "parlagest/digest.hpp"
#include "parlagest/error.hpp"
#include "parlagest/pipeline.hpp"
#include "parlagest/process.hpp"
#include "parlagest/xmi.hpp"
#include "support.hpp"

namespace {

using namespace parlagest;
namespace ts = testsupport;
namespace fs = std::filesystem;

class PipelineTest : public ::testing::Test {
 protected:
  TempDir tmp{"parlagest-pipeline"};
  std::vector<std::string> rows;

  fs::path root() const { return tmp.path(); }

  fs::path fake_engine() {
    const auto p = root() / "fake-ocr";
    ts::write_file(p, "#!/bin/sh\nprintf 'Der Landtag tagt heute.\\nDie Sitzung ist eröffnet.\\f' > \"$2.txt\"\n");
    ::chmod(p.c_str(), 0755);
    return p;
  }

  void readable(const std::string& id, const std::string& file_stem) {
    std::vector<std::string> lines = {"Landtag von Baden-Württemberg", "17. Wahlperiode", "1. Sitzung",
                                      "Stuttgart, Dienstag, 11. Mai 2021"};
    for (int i = 0; i < 4; ++i) lines.push_back("Meine sehr verehrten Damen und Herren, ich eröffne die Sitzung.");
    ts::write_text_pdf(root() / "src" / (file_stem + ".pdf"), {lines});
    rows.push_back(id + ",BW,17,src/" + file_stem + ".pdf,readable,antiqua,");
  }

  void scanned(const std::string& id, const std::string& quality_hint, const std::string& script = "antiqua") {
    cv::Mat page(400, 300, CV_8UC1, cv::Scalar(255));
    ts::write_image_pdf(root() / "src" / (id + ".pdf"), {page});
    rows.push_back(id + ",Bayern,1,src/" + id + ".pdf,scanned," + script + "," + quality_hint);
  }

  PipelineConfig config() {
    std::string text = std::string(kManifestHeader) + "\n";
    for (const auto& r : rows) text += r + "\n";
    ts::write_file(root() / "manifest.csv", text);
    PipelineConfig c;
    c.manifest_path = root() / "manifest.csv";
    c.store_path = root() / "store";
    c.out_path = root() / "out";
    c.ocr_engine = fake_engine().string();
    c.total_threads = 2;
    return c;
  }
};

TEST_F(PipelineTest, ReadableDocumentEndToEnd) {
  readable("bw-17-1", "Plenarprotokoll_17_1_11.05.2021_S._1-13");
  Pipeline p(config());
  const auto s = p.run();
  EXPECT_EQ(s.manifest_entries, 1u);
  EXPECT_EQ(s.readable, 1u);
  EXPECT_EQ(s.packaged, 1u);
  EXPECT_EQ(s.metadata_missing, 0u);
  EXPECT_TRUE(s.failures.empty());

  const auto files = list_corpus_files(root() / "out");
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(files[0], root() / "out" / "BW" / "xmi" / "17" / "bw-17-1.xmi.gz");
  const auto doc = xmi::read_xmi(files[0]);
  EXPECT_EQ(doc.provenance, Provenance::native_text);
  ASSERT_TRUE(doc.metadata);
  EXPECT_EQ(doc.metadata->timestamp_ms, 1620691200000);
  EXPECT_EQ(doc.metadata->subtitle, "17.Wahlperiode__1.Sitzung");
  EXPECT_EQ(doc.document_meta.document_title, "BW-Plenarprotokoll vom 11.05.2021");
  EXPECT_TRUE(doc.document_meta.document_uri.starts_with(doc.document_meta.document_base_uri));
  EXPECT_GT(doc.tokens.size(), 40u);

  const auto csv = ts::read_file(root() / "out" / "quality_documents.csv");
  EXPECT_TRUE(csv.starts_with(std::string(kQualityCsvHeader) + "\nbw-17-1,"));
  EXPECT_EQ(ts::read_file(root() / "out" / "failures.csv"), "id,stage,cause\n");
}

TEST_F(PipelineTest, RerunRewritesIdenticalBytes) {
  readable("bw-17-1", "Plenarprotokoll_17_1_11.05.2021_S._1-13");
  scanned("by-1", "poor");
  const auto c = config();
  Pipeline(c).run();
  std::map<fs::path, std::string> first;
  for (const auto& f : list_corpus_files(c.out_path)) first[f] = ts::read_file(f);
  fs::remove_all(c.store_path);
  Pipeline(c).run();
  std::map<fs::path, std::string> second;
  for (const auto& f : list_corpus_files(c.out_path)) second[f] = ts::read_file(f);
  EXPECT_EQ(first.size(), 2u);
  EXPECT_EQ(first, second);
}

TEST_F(PipelineTest, ScannedDocumentsEnhancedOnlyWhenPoor) {
  scanned("poor-scan", "poor");
  scanned("good-scan", "good", "fraktur");
  const auto s = Pipeline(config()).run();
  EXPECT_EQ(s.scanned, 2u);
  EXPECT_EQ(s.ocr_pages, 2u);
  EXPECT_EQ(s.enhanced_pages, 1u);
  EXPECT_EQ(s.packaged, 2u);
  EXPECT_EQ(s.metadata_missing, 2u);
  for (const auto& f : list_corpus_files(root() / "out")) {
    const auto doc = xmi::read_xmi(f);
    EXPECT_EQ(doc.provenance, Provenance::ocr);
    EXPECT_FALSE(doc.metadata);
    EXPECT_EQ(doc.script, f.filename() == "good-scan.xmi.gz" ? Script::fraktur : Script::antiqua);
    EXPECT_EQ(doc.text(doc.tokens[1].span), "Landtag");
  }
}

TEST_F(PipelineTest, FailuresAreIsolated) {
  readable("ok", "ok_1_2_03.04.2005");
  rows.push_back("gone,BW,1,src/missing.pdf,readable,,");
  ts::write_file(root() / "src" / "junk.pdf", "not a pdf");
  rows.push_back("junk,BW,1,src/junk.pdf,,,");
  const auto s = Pipeline(config()).run();
  EXPECT_EQ(s.packaged, 1u);
  ASSERT_EQ(s.failures.size(), 2u);
  const auto failures = ts::read_file(root() / "out" / "failures.csv");
  EXPECT_NE(failures.find("\ngone,fetch,"), std::string::npos) << failures;
  EXPECT_NE(failures.find("\njunk,classify,"), std::string::npos) << failures;
}

TEST_F(PipelineTest, EmptyManifest) {
  const auto s = Pipeline(config()).run();
  EXPECT_EQ(s.manifest_entries, 0u);
  EXPECT_EQ(s.packaged, 0u);
  EXPECT_TRUE(s.failures.empty());
}

TEST_F(PipelineTest, ConfigurationErrorsStopBeforeWork) {
  scanned("s", "good");
  auto c = config();
  c.ocr_engine = "definitely-not-an-ocr-engine";
  EXPECT_THROW(Pipeline(c).run(), ConfigError);
  EXPECT_FALSE(fs::exists(c.store_path / "records.json"));
  c = config();
  c.total_threads = 0;
  EXPECT_THROW(Pipeline(c).run(), ConfigError);
  c = config();
  c.dictionary_path = root() / "no-dict.txt";
  EXPECT_THROW(Pipeline(c).run(), ConfigError);
}

TEST_F(PipelineTest, StagesRunIndividuallyAndPickUpSidecars) {
  readable("bw", "Plenarprotokoll_17_1_11.05.2021");
  Pipeline p(config());
  RunSummary s;
  p.fetch(s);
  p.classify(s);
  p.extract(s);
  p.annotate(s);

  const auto records = load_records(p.records_path());
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].state, DocumentState::annotated);
  const auto sofa = ts::read_file(p.document_dir(records[0]) / "bw.sofa.txt");
  const auto doc = build_document("bw", sofa);
  nlohmann::json payload = {{"document_id", "bw"}, {"sofa_sha256", sha256_hex(sofa)}, {"layers", nlohmann::json::object()}};
  payload["layers"]["lemmas"] = nlohmann::json::array(
      {{{"begin", doc.tokens[0].span.begin}, {"end", doc.tokens[0].span.end}, {"value", "Landtag"}}});
  ts::write_file(p.document_dir(records[0]) / "bw.sidecar.json", payload.dump());

  // Rewind to extracted so annotate runs again with the payload present.
  auto rewound = records;
  rewound[0].state = DocumentState::extracted;
  save_records(rewound, p.records_path());
  RunSummary s2;
  p.annotate(s2);
  p.package(s2);
  EXPECT_EQ(s2.sidecar_attached, 1u);
  const auto out = xmi::read_xmi(list_corpus_files(root() / "out").at(0));
  ASSERT_EQ(out.lemmas.size(), 1u);
  EXPECT_EQ(out.tokens[0].lemma, 0u);
  EXPECT_EQ(out.annotation_note, "sidecar");
}

class CorpusTest : public ::testing::Test {
 protected:
  TempDir tmp{"parlagest-corpus"};

  void add(const std::string& id, const std::string& parliament, Provenance p, Script s, int sentences, int tokens) {
    std::string text;
    for (int i = 0; i < sentences; ++i) text += "Satz " + std::to_string(i) + " hier. ";
    auto doc = build_document(id, text);
    doc.tokens.resize(std::min<std::size_t>(doc.tokens.size(), tokens));
    doc.parliament = parliament;
    doc.provenance = p;
    doc.script = s;
    xmi::write_xmi(doc, tmp.path() / parliament / "xmi");
  }
};

TEST_F(CorpusTest, SubcorpusFilters) {
  for (auto f : {SubcorpusFilter::all, SubcorpusFilter::no_ocr, SubcorpusFilter::ocr_only, SubcorpusFilter::fraktur_only}) {
    EXPECT_TRUE(filter_subcorpus(tmp.path(), f).documents.empty());
  }
  add("native", "P", Provenance::native_text, Script::antiqua, 1, 3);
  add("antiqua", "P", Provenance::ocr, Script::antiqua, 1, 3);
  add("fraktur", "Q", Provenance::ocr, Script::fraktur, 1, 3);
  ts::write_file(tmp.path() / "Q" / "xmi" / "broken.xmi", "<nope");
  EXPECT_EQ(filter_subcorpus(tmp.path(), SubcorpusFilter::all).documents.size(), 3u);
  EXPECT_EQ(filter_subcorpus(tmp.path(), SubcorpusFilter::no_ocr).documents.size(), 1u);
  EXPECT_EQ(filter_subcorpus(tmp.path(), SubcorpusFilter::ocr_only).documents.size(), 2u);
  const auto fr = filter_subcorpus(tmp.path(), SubcorpusFilter::fraktur_only);
  ASSERT_EQ(fr.documents.size(), 1u);
  EXPECT_EQ(fr.documents[0].filename(), "fraktur.xmi.gz");
  ASSERT_EQ(fr.unreadable.size(), 1u);
  EXPECT_EQ(parse_subcorpus_filter("ocr_only"), SubcorpusFilter::ocr_only);
  EXPECT_EQ(parse_subcorpus_filter("some"), std::nullopt);
}

TEST_F(CorpusTest, StatsSumSentencesAndTokens) {
  add("a", "Bundestag", Provenance::native_text, Script::antiqua, 10, 1000);
  add("b", "Bundestag", Provenance::native_text, Script::antiqua, 15, 1000);
  add("c", "Bayern", Provenance::ocr, Script::antiqua, 2, 0);
  const auto stats = compute_corpus_stats(tmp.path());
  ASSERT_EQ(stats.rows.size(), 2u);
  EXPECT_EQ(stats.rows[0], (ParliamentStats{"Bayern", 1, 2, 0}));
  EXPECT_EQ(stats.rows[1], (ParliamentStats{"Bundestag", 2, 25, 100}));
  EXPECT_EQ(format_stats_csv(stats), "parliament,sessions,sentences,tokens\nBayern,1,2,0\nBundestag,2,25,100\n");
  const auto table = format_stats_table(stats);
  EXPECT_NE(table.find("Bundestag"), std::string::npos);
  EXPECT_NE(table.find("total              3            27             100\n"), std::string::npos) << table;
}

}  // namespace
