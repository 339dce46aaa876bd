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

#include "parlagest/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "parlagest/error.hpp"
#include "parlagest/image.hpp"
#include "parlagest/metadata.hpp"
#include "parlagest/parallel.hpp"
#include "parlagest/unicode.hpp"
#include "parlagest/xmi.hpp"

namespace parlagest {

namespace fs = std::filesystem;

void PipelineConfig::validate() const {
  if (store_path.empty()) throw ConfigError("store path must be set");
  if (out_path.empty()) throw ConfigError("output path must be set");
  if (total_threads < 1) throw ConfigError("threads must be >= 1");
  if (dpi < 1) throw ConfigError("dpi must be >= 1");
  if (fetch_delay_ms < 0) throw ConfigError("fetch delay must be >= 0");
  for (const fs::path* p : {&dictionary_path, &abbreviations_path, &protected_names_path}) {
    if (!p->empty() && !fs::is_regular_file(*p)) throw ConfigError("file not found: " + p->string());
  }
}

int default_thread_count() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string format_summary(const RunSummary& s) {
  std::ostringstream o;
  o << "entries " << s.manifest_entries << ", fetched " << s.fetched << " (" << s.bytes_transferred
    << " bytes), classified " << s.classified << " (readable " << s.readable << ", scanned " << s.scanned
    << "), extracted " << s.extracted << " (ocr pages " << s.ocr_pages << ", enhanced " << s.enhanced_pages
    << "), annotated " << s.annotated << " (sidecar " << s.sidecar_attached << "), packaged " << s.packaged
    << " (no date " << s.metadata_missing << "), quality rows " << s.quality_reports << ", failures "
    << s.failures.size() << "\n";
  for (const auto& f : s.failures) o << "  failed " << f.id << " [" << f.stage << "]: " << f.cause << "\n";
  return o.str();
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view data) {
  fs::create_directories(path.parent_path());
  const fs::path part = path.string() + ".part";
  {
    std::ofstream out(part, std::ios::binary | std::ios::trunc);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("cannot write " + part.string());
  }
  fs::rename(part, path);
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s;
}

std::string csv_escape(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

struct Outcome {
  DocumentRecord record;
  std::optional<StageFailure> failure;
  std::size_t pages = 0;
  std::size_t enhanced = 0;
  bool flag = false;  // stage specific: sidecar attached / metadata missing
};

}  // namespace

Pipeline::Pipeline(PipelineConfig config, std::ostream* progress)
    : config_(std::move(config)), progress_(progress) {}

void Pipeline::say(const std::string& line) const {
  static std::mutex mu;
  if (!progress_) return;
  std::lock_guard lock(mu);
  *progress_ << line << std::endl;
}

fs::path Pipeline::records_path() const { return config_.store_path / "records.json"; }

fs::path Pipeline::document_dir(const DocumentRecord& r) const { return config_.store_path / r.parliament; }

std::vector<DocumentRecord> Pipeline::load_records_or_empty() const {
  if (!fs::exists(records_path())) return {};
  return load_records(records_path());
}

const FrequencyDictionary& Pipeline::dictionary() {
  if (config_.dictionary_path.empty()) return FrequencyDictionary::default_german();
  if (!dictionary_) dictionary_ = FrequencyDictionary::load(config_.dictionary_path);
  return *dictionary_;
}

const WordList& Pipeline::abbreviations() {
  if (config_.abbreviations_path.empty()) return WordList::default_abbreviations();
  if (!abbreviations_) abbreviations_ = WordList::load(config_.abbreviations_path);
  return *abbreviations_;
}

const WordList& Pipeline::protected_names() {
  if (config_.protected_names_path.empty()) return WordList::default_protected_names();
  if (!protected_names_) protected_names_ = WordList::load(config_.protected_names_path);
  return *protected_names_;
}

RunSummary Pipeline::run() {
  config_.validate();
  if (config_.manifest_path.empty()) throw ConfigError("manifest path must be set");
  const SourceManifest manifest = load_manifest(config_.manifest_path);
  const bool needs_engine = std::any_of(manifest.entries.begin(), manifest.entries.end(),
                                        [](const ManifestEntry& e) { return e.format_hint != FormatHint::readable; });
  if (needs_engine) OcrEngine::resolve(config_.ocr_engine, config_.ocr_extra_args);
  // Load the word lists now so a bad file stops the run before any work.
  dictionary();
  abbreviations();
  protected_names();

  RunSummary summary;
  fetch(summary);
  classify(summary);
  extract(summary);
  annotate(summary);
  package(summary);
  quality(summary);
  write_failures(summary);
  return summary;
}

void Pipeline::fetch(RunSummary& summary) {
  config_.validate();
  if (config_.manifest_path.empty()) throw ConfigError("manifest path must be set");
  const SourceManifest manifest = load_manifest(config_.manifest_path);
  summary.manifest_entries = manifest.entries.size();
  say("[fetch] " + std::to_string(manifest.entries.size()) + " manifest entries");
  FetchResult r = fetch_documents(manifest, config_.store_path,
                                  FetchOptions{config_.fetch_delay_ms, static_cast<std::size_t>(config_.total_threads)});
  for (const auto& f : r.failures) {
    summary.failures.push_back({f.id, "fetch", one_line(f.message)});
    say("[fetch] " + f.id + " failed: " + one_line(f.message));
  }
  summary.fetched = r.records.size();
  summary.bytes_transferred = r.bytes_transferred;
  save_records(r.records, records_path());
}

void Pipeline::classify(RunSummary& summary) {
  auto records = load_records_or_empty();
  const ClassifyOptions options{config_.min_chars_per_page};
  auto outcomes = parallel_map(records, static_cast<std::size_t>(config_.total_threads), [&](const DocumentRecord& r) {
    Outcome o;
    o.record = r;
    if (r.state != DocumentState::fetched) return o;
    try {
      o.record = classify_document(r, options);
      o.flag = true;
    } catch (const std::exception& e) {
      o.failure = StageFailure{r.id, "classify", one_line(e.what())};
    }
    return o;
  });
  records.clear();
  for (auto& o : outcomes) {
    if (o.failure) {
      summary.failures.push_back(*o.failure);
      say("[classify] " + o.record.id + " failed: " + o.failure->cause);
    } else if (o.flag) {
      ++summary.classified;
      (*o.record.classification == Classification::readable ? summary.readable : summary.scanned)++;
      say("[classify] " + o.record.id + ": " + std::string(to_string(*o.record.classification)));
    }
    records.push_back(std::move(o.record));
  }
  save_records(records, records_path());
}

void Pipeline::extract(RunSummary& summary) {
  auto records = load_records_or_empty();
  const bool any_scanned = std::any_of(records.begin(), records.end(), [](const DocumentRecord& r) {
    return r.state == DocumentState::classified && r.classification == Classification::scanned;
  });
  std::optional<OcrEngine> engine;
  if (any_scanned) engine = OcrEngine::resolve(config_.ocr_engine, config_.ocr_extra_args);
  const WorkerBudget budget = compute_worker_budget(config_.total_threads, config_.ocr_strategy);
  const WordList& names = protected_names();

  auto text_path = [&](const DocumentRecord& r) { return document_dir(r) / (r.id + ".txt"); };

  auto native = [&](const DocumentRecord& r) {
    Outcome o;
    o.record = r;
    if (r.state != DocumentState::classified || r.classification != Classification::readable) return o;
    try {
      const std::string text = extract_native_text(o.record, names);
      write_file(text_path(r), text);
      o.flag = true;
    } catch (const std::exception& e) {
      o.record = r;
      o.failure = StageFailure{r.id, "extract", one_line(e.what())};
    }
    return o;
  };
  auto outcomes = parallel_map(records, static_cast<std::size_t>(config_.total_threads), native);

  // Scanned documents go one at a time; their pages share the OCR worker pool.
  for (auto& o : outcomes) {
    DocumentRecord& r = o.record;
    if (r.state != DocumentState::classified || r.classification != Classification::scanned) continue;
    try {
      say("[ocr] " + r.id + ": rendering at " + std::to_string(config_.dpi) + " dpi");
      auto pages = rasterize_pages(r, config_.dpi);
      auto split = split_scan_quality(std::move(pages), r.scan_quality_hint);
      OcrJob job;
      job.document_id = r.id;
      job.language_model = language_model_for(r.script);
      job.engine_cores = budget.engine_cores_per_job;
      for (auto& p : split.good) job.pages.push_back(std::move(p));
      for (const auto& p : split.poor) {
        job.pages.push_back(enhance_image(p));
        ++o.enhanced;
      }
      std::sort(job.pages.begin(), job.pages.end(),
                [](const PageImage& a, const PageImage& b) { return a.page_index < b.page_index; });
      if (config_.keep_images) {
        for (const auto& p : job.pages) save_page_png(p, document_dir(r) / r.id / "pages");
      }
      say("[ocr] " + r.id + ": " + std::to_string(job.pages.size()) + " pages (" + std::to_string(o.enhanced) +
          " enhanced), model " + std::string(to_string(job.language_model)) + ", " +
          std::to_string(budget.parallel_jobs) + " jobs x " + std::to_string(budget.engine_cores_per_job) +
          " cores");
      const std::string text = run_ocr(job, *engine, budget.parallel_jobs);
      write_file(text_path(r), text);
      o.pages = job.pages.size();
      advance_state(r, DocumentState::extracted);
      o.flag = true;
    } catch (const std::exception& e) {
      o.failure = StageFailure{r.id, "ocr", one_line(e.what())};
      if (auto* oe = dynamic_cast<const OcrError*>(&e); oe && !oe->engine_stderr().empty()) {
        o.failure->cause += " | engine: " + one_line(oe->engine_stderr());
      }
      o.enhanced = 0;
    }
  }

  records.clear();
  for (auto& o : outcomes) {
    if (o.failure) {
      summary.failures.push_back(*o.failure);
      say("[" + o.failure->stage + "] " + o.failure->id + " failed: " + o.failure->cause);
      // Keep the record at its last good state.
      if (o.record.state > DocumentState::classified) o.record.state = DocumentState::classified;
    } else if (o.flag) {
      ++summary.extracted;
      summary.ocr_pages += o.pages;
      summary.enhanced_pages += o.enhanced;
    }
    records.push_back(std::move(o.record));
  }
  save_records(records, records_path());
}

void Pipeline::annotate(RunSummary& summary) {
  auto records = load_records_or_empty();
  const WordList& abbr = abbreviations();
  auto outcomes = parallel_map(records, static_cast<std::size_t>(config_.total_threads), [&](const DocumentRecord& r) {
    Outcome o;
    o.record = r;
    if (r.state != DocumentState::extracted) return o;
    try {
      const fs::path dir = document_dir(r);
      const std::string text = normalize_text(read_file(dir / (r.id + ".txt")));
      AnnotatedDocument doc = build_document(r.id, text, abbr);
      doc.parliament = r.parliament;
      doc.provenance = r.provenance.value_or(Provenance::native_text);
      doc.script = r.script;
      write_file(dir / (r.id + ".sofa.txt"), doc.sofa);
      const fs::path payload = dir / (r.id + ".sidecar.json");
      if (fs::exists(payload)) {
        doc = attach_external_annotations(std::move(doc), load_payload(payload),
                                          AttachOptions{config_.replace_segmentation});
        o.flag = true;
      }
      const fs::path tmp_dir = dir / ".annotated";
      const fs::path written = xmi::write_xmi(doc, tmp_dir, true);
      fs::rename(written, dir / (r.id + ".annotated.xmi.gz"));
      advance_state(o.record, DocumentState::annotated);
    } catch (const std::exception& e) {
      o.record = r;
      o.flag = false;
      o.failure = StageFailure{r.id, "annotate", one_line(e.what())};
    }
    return o;
  });
  records.clear();
  for (auto& o : outcomes) {
    if (o.failure) {
      summary.failures.push_back(*o.failure);
      say("[annotate] " + o.record.id + " failed: " + o.failure->cause);
    } else if (o.record.state == DocumentState::annotated) {
      ++summary.annotated;
      if (o.flag) ++summary.sidecar_attached;
    }
    records.push_back(std::move(o.record));
  }
  save_records(records, records_path());
}

void Pipeline::package(RunSummary& summary) {
  auto records = load_records_or_empty();
  fs::create_directories(config_.out_path);
  const fs::path out_abs = fs::absolute(config_.out_path).lexically_normal();
  std::string base_uri = "file:" + out_abs.generic_string();
  if (base_uri.back() != '/') base_uri.push_back('/');

  auto outcomes = parallel_map(records, static_cast<std::size_t>(config_.total_threads), [&](const DocumentRecord& r) {
    Outcome o;
    o.record = r;
    if (r.state != DocumentState::annotated) return o;
    try {
      const fs::path dir = document_dir(r);
      AnnotatedDocument doc = xmi::read_xmi(dir / (r.id + ".annotated.xmi.gz"));
      const std::string text = normalize_text(read_file(dir / (r.id + ".txt")));
      const std::string source_name = fs::path(r.locator).stem().string();
      std::optional<SessionMetadata> meta;
      for (const std::string& name : {source_name, r.id}) {
        try {
          meta = extract_metadata(text, name, r.parliament);
          break;
        } catch (const MetadataMissingError&) {
        }
      }
      doc.metadata = meta;
      o.flag = !meta;
      auto& dm = doc.document_meta;
      dm.document_title = meta ? meta->title : r.parliament + "-Plenarprotokoll";
      dm.document_id = xmi::file_name(r.id, config_.gzip);
      const fs::path target_dir = xmi::output_dir(out_abs, r.parliament, meta ? legislature_of(*meta) : std::nullopt);
      dm.document_base_uri = base_uri;
      dm.document_uri = base_uri + fs::relative(target_dir / dm.document_id, out_abs).generic_string();
      xmi::write_xmi(doc, target_dir, config_.gzip);
      advance_state(o.record, DocumentState::packaged);
    } catch (const std::exception& e) {
      o.record = r;
      o.flag = false;
      o.failure = StageFailure{r.id, "package", one_line(e.what())};
    }
    return o;
  });
  records.clear();
  for (auto& o : outcomes) {
    if (o.failure) {
      summary.failures.push_back(*o.failure);
      say("[package] " + o.record.id + " failed: " + o.failure->cause);
    } else if (o.flag) {
      ++summary.metadata_missing;
      say("[package] " + o.record.id + ": no session date found, packaged without DocumentAnnotation");
    }
    records.push_back(std::move(o.record));
  }
  summary.packaged = static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const DocumentRecord& r) {
    return r.state == DocumentState::packaged;
  }));
  save_records(records, records_path());
}

void Pipeline::quality(RunSummary& summary) {
  const FrequencyDictionary& dict = dictionary();
  const auto files = list_corpus_files(config_.out_path);
  struct Scored {
    std::optional<QualityReport> report;
    std::optional<StageFailure> failure;
  };
  auto scored = parallel_map(files, static_cast<std::size_t>(config_.total_threads), [&](const fs::path& p) {
    Scored s;
    try {
      const AnnotatedDocument doc = xmi::read_xmi(p);
      s.report = score_document(doc, dict);
    } catch (const std::exception& e) {
      s.failure = StageFailure{p.filename().string(), "quality", one_line(e.what())};
    }
    return s;
  });
  std::vector<QualityReport> reports;
  for (auto& s : scored) {
    if (s.failure) summary.failures.push_back(*s.failure);
    if (s.report) reports.push_back(std::move(*s.report));
  }
  summary.quality_reports = reports.size();
  fs::create_directories(config_.out_path);
  write_file(config_.out_path / "quality_documents.csv", format_quality_csv(reports));
  write_file(config_.out_path / "quality_parliaments.csv", format_quality_csv(aggregate_reports(reports)));
  say("[quality] " + std::to_string(reports.size()) + " documents scored");
}

void Pipeline::write_failures(const RunSummary& summary) const {
  std::string out = "id,stage,cause\n";
  for (const auto& f : summary.failures) out += csv_escape(f.id) + "," + f.stage + "," + csv_escape(f.cause) + "\n";
  write_file(config_.out_path / "failures.csv", out);
}

std::vector<fs::path> list_corpus_files(const fs::path& corpus_dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(corpus_dir)) return out;
  for (const auto& entry : fs::recursive_directory_iterator(corpus_dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.find(".annotated.") != std::string::npos) continue;
    if (name.ends_with(".xmi.gz") || name.ends_with(".xmi")) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string_view to_string(SubcorpusFilter f) {
  switch (f) {
    case SubcorpusFilter::all: return "all";
    case SubcorpusFilter::no_ocr: return "no_ocr";
    case SubcorpusFilter::ocr_only: return "ocr_only";
    case SubcorpusFilter::fraktur_only: return "fraktur_only";
  }
  return "?";
}

std::optional<SubcorpusFilter> parse_subcorpus_filter(std::string_view s) {
  for (auto f : {SubcorpusFilter::all, SubcorpusFilter::no_ocr, SubcorpusFilter::ocr_only, SubcorpusFilter::fraktur_only}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

SubcorpusResult filter_subcorpus(const fs::path& corpus_dir, SubcorpusFilter filter) {
  SubcorpusResult result;
  for (const auto& path : list_corpus_files(corpus_dir)) {
    AnnotatedDocument doc;
    try {
      doc = xmi::read_xmi(path);
    } catch (const std::exception& e) {
      result.unreadable.push_back({path, one_line(e.what())});
      continue;
    }
    const bool ocr = doc.provenance == Provenance::ocr;
    bool keep = false;
    switch (filter) {
      case SubcorpusFilter::all: keep = true; break;
      case SubcorpusFilter::no_ocr: keep = !ocr; break;
      case SubcorpusFilter::ocr_only: keep = ocr; break;
      case SubcorpusFilter::fraktur_only: keep = ocr && doc.script == Script::fraktur; break;
    }
    if (keep) result.documents.push_back(path);
  }
  return result;
}

void accumulate_stats(std::vector<ParliamentStats>& rows, const AnnotatedDocument& doc) {
  const std::string name = doc.parliament.empty() ? "unknown" : doc.parliament;
  auto it = std::lower_bound(rows.begin(), rows.end(), name,
                             [](const ParliamentStats& r, const std::string& n) { return r.parliament < n; });
  if (it == rows.end() || it->parliament != name) it = rows.insert(it, ParliamentStats{name});
  ++it->sessions;
  it->sentences += doc.sentences.size();
  it->tokens += doc.tokens.size();
}

CorpusStats compute_corpus_stats(const fs::path& corpus_dir) {
  CorpusStats stats;
  for (const auto& path : list_corpus_files(corpus_dir)) {
    try {
      accumulate_stats(stats.rows, xmi::read_xmi(path));
    } catch (const std::exception& e) {
      stats.unreadable.push_back({path, one_line(e.what())});
    }
  }
  return stats;
}

std::string format_stats_csv(const CorpusStats& stats) {
  std::string out = std::string(kStatsCsvHeader) + "\n";
  for (const auto& r : stats.rows) {
    out += csv_escape(r.parliament) + "," + std::to_string(r.sessions) + "," + std::to_string(r.sentences) + "," +
           std::to_string(r.tokens) + "\n";
  }
  return out;
}

std::string format_stats_table(const CorpusStats& stats) {
  std::size_t name_w = std::string_view("parliament").size();
  for (const auto& r : stats.rows) name_w = std::max(name_w, unicode::length(r.parliament));
  auto pad = [](const std::string& s, std::size_t w) {
    const std::size_t len = unicode::length(s);
    return s + std::string(w > len ? w - len : 0, ' ');
  };
  std::ostringstream o;
  o << pad("parliament", name_w) << std::setw(10) << "sessions" << std::setw(14) << "sentences" << std::setw(16)
    << "tokens" << "\n";
  ParliamentStats total{"total"};
  for (const auto& r : stats.rows) {
    o << pad(r.parliament, name_w) << std::setw(10) << r.sessions << std::setw(14) << r.sentences << std::setw(16)
      << r.tokens << "\n";
    total.sessions += r.sessions;
    total.sentences += r.sentences;
    total.tokens += r.tokens;
  }
  o << pad(total.parliament, name_w) << std::setw(10) << total.sessions << std::setw(14) << total.sentences
    << std::setw(16) << total.tokens << "\n";
  return o.str();
}

}  // namespace parlagest
