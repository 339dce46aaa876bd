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

// parlagest: command-line front end. Progress and summaries go to stderr,
// data goes to files under --out / --store.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "parlagest/error.hpp"
#include "parlagest/pipeline.hpp"

using namespace parlagest;

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build an annotated corpus of parliamentary protocols"};
  app.require_subcommand(1);
  app.fallthrough();

  PipelineConfig cfg;
  cfg.store_path = "store";
  cfg.out_path = "out";
  cfg.total_threads = default_thread_count();
  std::string strategy = "four_core_few_jobs";
  std::string filter = "all";
  std::string extra_args;
  bool no_gzip = false;

  app.add_option("--manifest", cfg.manifest_path, "Source manifest (CSV)");
  app.add_option("--store", cfg.store_path, "Document store directory")->capture_default_str();
  app.add_option("--out", cfg.out_path, "Output corpus directory")->capture_default_str();
  app.add_option("--dpi", cfg.dpi, "Rasterization resolution")->capture_default_str();
  app.add_option("--ocr-engine", cfg.ocr_engine, "OCR executable")->capture_default_str();
  app.add_option("--ocr-strategy", strategy, "one_core_many_jobs or four_core_few_jobs")
      ->check(CLI::IsMember({"one_core_many_jobs", "four_core_few_jobs"}))
      ->capture_default_str();
  app.add_option("--ocr-extra-args", extra_args, "Extra arguments passed to the OCR engine");
  app.add_option("--threads", cfg.total_threads, "Total worker threads")->capture_default_str();
  app.add_option("--dict", cfg.dictionary_path, "Frequency dictionary (word frequency per line)");
  app.add_option("--abbreviations", cfg.abbreviations_path, "Abbreviation list");
  app.add_option("--protected-names", cfg.protected_names_path, "Hyphenated names kept at line breaks");
  app.add_option("--fetch-delay-ms", cfg.fetch_delay_ms, "Pause after each remote download");
  app.add_option("--min-chars", cfg.min_chars_per_page, "Characters per page for a readable PDF")
      ->capture_default_str();
  app.add_flag("--keep-images", cfg.keep_images, "Keep page images under <store>/<parliament>/<id>/pages");
  app.add_flag("--no-gzip", no_gzip, "Write plain .xmi files");
  app.add_flag("--replace-segmentation", cfg.replace_segmentation,
               "Use sidecar sentences and tokens instead of the native ones");
  app.add_option("--filter", filter, "Subcorpus filter")
      ->check(CLI::IsMember({"all", "no_ocr", "ocr_only", "fraktur_only"}))
      ->capture_default_str();

  auto* run = app.add_subcommand("run", "All stages end to end");
  auto* fetch = app.add_subcommand("fetch", "Copy or download manifest entries into the store");
  auto* classify = app.add_subcommand("classify", "Classify fetched PDFs as readable or scanned");
  auto* ocr = app.add_subcommand("ocr", "Extract text (native or OCR)");
  auto* annotate = app.add_subcommand("annotate", "Normalize, segment, attach sidecar layers");
  auto* package = app.add_subcommand("package", "Extract metadata and write XMI");
  auto* quality = app.add_subcommand("quality", "Spellcheck audit of the packaged corpus");
  auto* stats = app.add_subcommand("stats", "Sessions, sentences and tokens per parliament");
  auto* subcorpus = app.add_subcommand("subcorpus", "List documents of a subcorpus");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  cfg.ocr_strategy = *parse_ocr_strategy(strategy);
  cfg.ocr_extra_args = split_words(extra_args);
  cfg.gzip = !no_gzip;

  try {
    if (*stats) {
      const CorpusStats s = compute_corpus_stats(cfg.out_path);
      write_text(cfg.out_path / "corpus_stats.csv", format_stats_csv(s));
      std::cerr << format_stats_table(s);
      for (const auto& u : s.unreadable) std::cerr << "unreadable " << u.path.string() << ": " << u.error << "\n";
      return 0;
    }
    if (*subcorpus) {
      const auto f = *parse_subcorpus_filter(filter);
      const SubcorpusResult r = filter_subcorpus(cfg.out_path, f);
      std::string list;
      for (const auto& p : r.documents) list += p.string() + "\n";
      write_text(cfg.out_path / ("subcorpus_" + filter + ".txt"), list);
      std::cerr << "subcorpus " << filter << ": " << r.documents.size() << " documents";
      if (!r.unreadable.empty()) std::cerr << ", " << r.unreadable.size() << " unreadable";
      std::cerr << "\n";
      for (const auto& u : r.unreadable) std::cerr << "unreadable " << u.path.string() << ": " << u.error << "\n";
      return 0;
    }

    Pipeline pipeline(cfg, &std::cerr);
    RunSummary summary;
    if (*run) {
      summary = pipeline.run();
    } else {
      cfg.validate();
      if (*fetch) pipeline.fetch(summary);
      if (*classify) pipeline.classify(summary);
      if (*ocr) pipeline.extract(summary);
      if (*annotate) pipeline.annotate(summary);
      if (*package) pipeline.package(summary);
      if (*quality) pipeline.quality(summary);
      pipeline.write_failures(summary);
    }
    std::cerr << format_summary(summary);
    return 0;
  } catch (const ManifestError& e) {
    std::cerr << "manifest error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
