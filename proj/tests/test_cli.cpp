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

#include "parlagest/manifest.hpp"
#include "parlagest/process.hpp"
#include "support.hpp"

namespace {

using namespace parlagest;
namespace ts = testsupport;

class Cli : public ::testing::Test {
 protected:
  TempDir tmp{"parlagest-cli"};

  ProcessResult cli(std::vector<std::string> args) {
    args.insert(args.begin(), PARLAGEST_CLI_PATH);
    args.push_back("--store");
    args.push_back((tmp.path() / "store").string());
    args.push_back("--out");
    args.push_back((tmp.path() / "out").string());
    return run_process(args);
  }

  std::string manifest(const std::string& rows) {
    const auto p = tmp.path() / "m.csv";
    ts::write_file(p, std::string(kManifestHeader) + "\n" + rows);
    return p.string();
  }
};

TEST_F(Cli, EmptyManifestSucceeds) {
  const auto r = cli({"run", "--manifest", manifest("")});
  EXPECT_EQ(r.exit_code, 0) << r.stderr_text;
  EXPECT_TRUE(std::filesystem::exists(tmp.path() / "out" / "failures.csv"));
}

TEST_F(Cli, ManifestErrorExitsWithTwo) {
  const auto r = cli({"run", "--manifest", manifest("a,B,1,x.pdf\na,B,1,y.pdf\n")});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.stderr_text.find("duplicate id"), std::string::npos) << r.stderr_text;
}

TEST_F(Cli, ConfigurationErrorsExitWithOne) {
  auto r = cli({"run", "--manifest", manifest("a,B,1,x.pdf,scanned,,\n"), "--ocr-engine", "no-such-engine-xyz"});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.stderr_text.find("no-such-engine-xyz"), std::string::npos) << r.stderr_text;
  r = cli({"run", "--manifest", manifest(""), "--threads", "0"});
  EXPECT_EQ(r.exit_code, 1);
  r = cli({"run", "--manifest", manifest(""), "--ocr-strategy", "sixteen_core"});
  EXPECT_EQ(r.exit_code, 1);
  r = cli({"frobnicate"});
  EXPECT_EQ(r.exit_code, 1);
}

TEST_F(Cli, StatsAndSubcorpusOnAnEmptyCorpus) {
  auto r = cli({"stats"});
  EXPECT_EQ(r.exit_code, 0) << r.stderr_text;
  EXPECT_EQ(ts::read_file(tmp.path() / "out" / "corpus_stats.csv"), "parliament,sessions,sentences,tokens\n");
  r = cli({"subcorpus", "--filter", "fraktur_only"});
  EXPECT_EQ(r.exit_code, 0) << r.stderr_text;
  EXPECT_EQ(ts::read_file(tmp.path() / "out" / "subcorpus_fraktur_only.txt"), "");
}

TEST_F(Cli, ReadableDocumentThroughSubcommands) {
  std::vector<std::string> lines(6, "Der Landtag hat in seiner heutigen Sitzung beschlossen:");
  ts::write_text_pdf(tmp.path() / "p_3_4_05.06.2007.pdf", {lines});
  const auto m = manifest("doc,Hessen,3,p_3_4_05.06.2007.pdf,readable,,\n");
  for (const char* stage : {"fetch", "classify", "ocr", "annotate", "package", "quality"}) {
    const auto r = cli({stage, "--manifest", m});
    ASSERT_EQ(r.exit_code, 0) << stage << ": " << r.stderr_text;
  }
  EXPECT_TRUE(std::filesystem::exists(tmp.path() / "out" / "Hessen" / "xmi" / "3" / "doc.xmi.gz"));
  const auto r = cli({"stats"});
  EXPECT_NE(r.stderr_text.find("Hessen"), std::string::npos);
  EXPECT_TRUE(ts::read_file(tmp.path() / "out" / "corpus_stats.csv").find("\nHessen,1,1,") != std::string::npos);
}

}  // namespace
