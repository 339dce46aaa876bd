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

#include "parlagest/manifest.hpp"

#include <curl/curl.h>

#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "parlagest/error.hpp"
#include "parlagest/parallel.hpp"
#include "parlagest/pdf.hpp"
#include "parlagest/unicode.hpp"

namespace parlagest {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(std::string_view line, int line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && trim(cur).empty()) {
      quoted = true;
      was_quoted = true;
      cur.clear();
    } else if (c == ',') {
      fields.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw ManifestError("unterminated quoted field", line_no);
  fields.push_back(was_quoted ? cur : trim(cur));
  return fields;
}

std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos && trim(v) == v) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out.push_back(static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16)));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

bool is_remote(std::string_view locator) {
  return locator.rfind("http://", 0) == 0 || locator.rfind("https://", 0) == 0 ||
         locator.rfind("ftp://", 0) == 0;
}

fs::path local_source(std::string_view locator, const fs::path& base_dir) {
  if (locator.rfind("file:", 0) == 0) {
    std::string_view rest = locator.substr(5);
    if (rest.rfind("//", 0) == 0) {
      rest.remove_prefix(2);
      const auto slash = rest.find('/');
      rest = slash == std::string_view::npos ? std::string_view() : rest.substr(slash);
    }
    return fs::path(percent_decode(rest));
  }
  fs::path p(locator);
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return p;
}

void copy_atomically(const fs::path& src, const fs::path& dest, std::uintmax_t& bytes) {
  if (!fs::is_regular_file(src)) throw std::runtime_error("source not found: " + src.string());
  const fs::path part = dest.string() + ".part";
  fs::copy_file(src, part, fs::copy_options::overwrite_existing);
  fs::rename(part, dest);
  bytes = fs::file_size(dest);
}

std::size_t write_to_stream(char* ptr, std::size_t size, std::size_t nmemb, void* userdata) {
  auto* out = static_cast<std::ofstream*>(userdata);
  out->write(ptr, static_cast<std::streamsize>(size * nmemb));
  return out->good() ? size * nmemb : 0;
}

void download(const std::string& url, const fs::path& dest, std::uintmax_t& bytes) {
  static std::once_flag init;
  std::call_once(init, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });

  const fs::path part = dest.string() + ".part";
  std::string error;
  {
    std::ofstream out(part, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + part.string());
    std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), &curl_easy_cleanup);
    if (!curl) throw std::runtime_error("curl initialisation failed");
    char errbuf[CURL_ERROR_SIZE] = {0};
    curl_easy_setopt(curl.get(), CURLOPT_URL, url.c_str());
    curl_easy_setopt(curl.get(), CURLOPT_FOLLOWLOCATION, 1L);
    curl_easy_setopt(curl.get(), CURLOPT_FAILONERROR, 1L);
    curl_easy_setopt(curl.get(), CURLOPT_CONNECTTIMEOUT, 15L);
    curl_easy_setopt(curl.get(), CURLOPT_TIMEOUT, 300L);
    curl_easy_setopt(curl.get(), CURLOPT_NOSIGNAL, 1L);
    curl_easy_setopt(curl.get(), CURLOPT_USERAGENT, "parlagest/0.1");
    curl_easy_setopt(curl.get(), CURLOPT_ERRORBUFFER, errbuf);
    curl_easy_setopt(curl.get(), CURLOPT_WRITEFUNCTION, &write_to_stream);
    curl_easy_setopt(curl.get(), CURLOPT_WRITEDATA, &out);
    const CURLcode rc = curl_easy_perform(curl.get());
    if (rc != CURLE_OK) error = errbuf[0] ? errbuf : curl_easy_strerror(rc);
  }
  if (!error.empty()) {
    std::error_code ec;
    fs::remove(part, ec);
    throw std::runtime_error(error);
  }
  fs::rename(part, dest);
  bytes = fs::file_size(dest);
}

}  // namespace

SourceManifest parse_manifest(const std::string& text) {
  SourceManifest manifest;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line, line_no);
    if (!header_seen) {
      std::string joined;
      for (std::size_t i = 0; i < fields.size(); ++i) joined += (i ? "," : "") + fields[i];
      if (joined != kManifestHeader) {
        throw ManifestError(std::string("expected header '") + kManifestHeader + "'", line_no);
      }
      header_seen = true;
      continue;
    }
    if (fields.size() < 4 || fields.size() > 7) {
      throw ManifestError("expected 4 to 7 fields, found " + std::to_string(fields.size()), line_no);
    }
    fields.resize(7);
    ManifestEntry e;
    e.id = fields[0];
    e.parliament = fields[1];
    e.period_label = fields[2];
    e.locator = fields[3];
    if (e.id.empty()) throw ManifestError("empty id", line_no);
    if (e.parliament.empty()) throw ManifestError("empty parliament for '" + e.id + "'", line_no);
    if (e.locator.empty()) throw ManifestError("empty locator for '" + e.id + "'", line_no);
    if (e.id.find('/') != std::string::npos || e.parliament.find('/') != std::string::npos ||
        e.id == "." || e.id == ".." || e.parliament == "." || e.parliament == "..") {
      throw ManifestError("id and parliament must be usable as file names", line_no);
    }
    auto hint = [&](const std::string& v, auto parse, const char* what) {
      if (v.empty()) return *parse("unknown");
      auto parsed = parse(v);
      if (!parsed) throw ManifestError(std::string("invalid ") + what + " '" + v + "'", line_no);
      return *parsed;
    };
    e.format_hint = hint(fields[4], parse_format_hint, "format_hint");
    e.script_hint = hint(fields[5], parse_script_hint, "script_hint");
    e.scan_quality_hint = hint(fields[6], parse_scan_quality_hint, "scan_quality_hint");
    if (auto [it, inserted] = seen.emplace(e.id, line_no); !inserted) {
      throw ManifestError("duplicate id '" + e.id + "' on lines " + std::to_string(it->second) +
                              " and " + std::to_string(line_no),
                          line_no);
    }
    manifest.entries.push_back(std::move(e));
  }
  if (!header_seen) throw ManifestError("missing header row", line_no > 0 ? 1 : 0);
  return manifest;
}

SourceManifest load_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError("cannot open manifest " + path.string(), 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  SourceManifest m = parse_manifest(buf.str());
  m.base_dir = fs::absolute(path).parent_path();
  return m;
}

std::string format_manifest(const SourceManifest& manifest) {
  std::string out = std::string(kManifestHeader) + "\n";
  for (const auto& e : manifest.entries) {
    out += csv_field(e.id) + "," + csv_field(e.parliament) + "," + csv_field(e.period_label) + "," +
           csv_field(e.locator) + "," + std::string(to_string(e.format_hint)) + "," +
           std::string(to_string(e.script_hint)) + "," + std::string(to_string(e.scan_quality_hint)) + "\n";
  }
  return out;
}

void write_manifest(const SourceManifest& manifest, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << format_manifest(manifest);
}

void advance_state(DocumentRecord& record, DocumentState next) {
  if (next < record.state) {
    throw PreconditionError(record.id + ": cannot move from state " + std::string(to_string(record.state)) +
                            " back to " + std::string(to_string(next)));
  }
  record.state = next;
}

void validate_record(const DocumentRecord& r) {
  if (r.id.empty() || r.parliament.empty()) throw ValidationError("record without id or parliament");
  if (r.state >= DocumentState::classified) {
    if (!r.classification) throw ValidationError(r.id + ": classified record without classification");
    if (r.page_count < 1) throw ValidationError(r.id + ": page_count must be >= 1");
    if (!r.provenance) throw ValidationError(r.id + ": classified record without provenance");
  }
  if (r.classification && r.provenance &&
      ((*r.provenance == Provenance::native_text) != (*r.classification == Classification::readable))) {
    throw ValidationError(r.id + ": provenance native_text must coincide with classification readable");
  }
}

fs::path store_path_for(const fs::path& store, const std::string& parliament, const std::string& id) {
  return store / parliament / (id + ".pdf");
}

FetchResult fetch_documents(const SourceManifest& manifest, const fs::path& store, const FetchOptions& options) {
  struct Outcome {
    std::optional<DocumentRecord> record;
    std::optional<FetchFailure> failure;
    std::uintmax_t bytes = 0;
  };
  std::error_code ec;
  fs::create_directories(store, ec);
  if (ec || !fs::is_directory(store)) throw ConfigError("store directory not writable: " + store.string());

  auto fetch_one = [&](const ManifestEntry& e) -> Outcome {
    Outcome out;
    const fs::path dest = store_path_for(store, e.parliament, e.id);
    try {
      fs::create_directories(dest.parent_path());
      if (!(fs::is_regular_file(dest) && fs::file_size(dest) > 0)) {
        if (is_remote(e.locator)) {
          download(e.locator, dest, out.bytes);
          if (options.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(options.delay_ms));
        } else {
          copy_atomically(local_source(e.locator, manifest.base_dir), dest, out.bytes);
        }
      }
      DocumentRecord r;
      r.id = e.id;
      r.parliament = e.parliament;
      r.period_label = e.period_label;
      r.locator = e.locator;
      r.local_path = dest;
      r.format_hint = e.format_hint;
      r.script_hint = e.script_hint;
      r.scan_quality_hint = e.scan_quality_hint;
      r.state = DocumentState::fetched;
      out.record = std::move(r);
    } catch (const std::exception& ex) {
      out.failure = FetchFailure{e.id, ex.what()};
    }
    return out;
  };

  FetchResult result;
  for (auto& o : parallel_map(manifest.entries, options.workers, fetch_one)) {
    if (o.record) result.records.push_back(std::move(*o.record));
    if (o.failure) result.failures.push_back(std::move(*o.failure));
    result.bytes_transferred += o.bytes;
  }
  return result;
}

double extractable_chars_per_page(const fs::path& pdf_path) {
  const auto doc = pdf::Document::open(pdf_path);
  std::size_t total = 0;
  for (int p = 0; p < doc.page_count(); ++p) {
    for (char32_t c : unicode::decode(pdf::extract_page_text(doc, p))) {
      if (!unicode::is_space(c)) ++total;
    }
  }
  return static_cast<double>(total) / doc.page_count();
}

DocumentRecord classify_document(DocumentRecord record, const ClassifyOptions& options) {
  if (record.state != DocumentState::fetched) {
    throw PreconditionError(record.id + ": classify expects a fetched record");
  }
  double density = 0.0;
  try {
    const auto doc = pdf::Document::open(record.local_path);
    record.page_count = doc.page_count();
    std::size_t total = 0;
    if (record.format_hint == FormatHint::unknown) {
      for (int p = 0; p < doc.page_count(); ++p) {
        for (char32_t c : unicode::decode(pdf::extract_page_text(doc, p))) {
          if (!unicode::is_space(c)) ++total;
        }
      }
      density = static_cast<double>(total) / doc.page_count();
    }
  } catch (const PdfError& e) {
    throw ClassificationError(record.id, e.what());
  }

  switch (record.format_hint) {
    case FormatHint::readable:
      record.classification = Classification::readable;
      break;
    case FormatHint::scanned:
      record.classification = Classification::scanned;
      break;
    case FormatHint::unknown:
      record.classification =
          density >= options.min_chars_per_page ? Classification::readable : Classification::scanned;
      break;
  }
  record.provenance =
      *record.classification == Classification::readable ? Provenance::native_text : Provenance::ocr;
  record.script = record.script_hint == ScriptHint::fraktur ? Script::fraktur : Script::antiqua;
  advance_state(record, DocumentState::classified);
  return record;
}

namespace {

nlohmann::json to_json(const DocumentRecord& r) {
  nlohmann::json j{
      {"id", r.id},
      {"parliament", r.parliament},
      {"period", r.period_label},
      {"locator", r.locator},
      {"local_path", r.local_path.string()},
      {"format_hint", to_string(r.format_hint)},
      {"script_hint", to_string(r.script_hint)},
      {"scan_quality_hint", to_string(r.scan_quality_hint)},
      {"script", to_string(r.script)},
      {"page_count", r.page_count},
      {"state", to_string(r.state)},
  };
  j["classification"] = r.classification ? nlohmann::json(to_string(*r.classification)) : nlohmann::json();
  j["provenance"] = r.provenance ? nlohmann::json(to_string(*r.provenance)) : nlohmann::json();
  return j;
}

template <typename T, typename Parse>
T required_enum(const nlohmann::json& j, const char* key, Parse parse) {
  auto v = parse(j.at(key).get<std::string>());
  if (!v) throw ValidationError(std::string("invalid value for ") + key);
  return *v;
}

DocumentRecord record_from_json(const nlohmann::json& j) {
  DocumentRecord r;
  r.id = j.at("id").get<std::string>();
  r.parliament = j.at("parliament").get<std::string>();
  r.period_label = j.value("period", "");
  r.locator = j.value("locator", "");
  r.local_path = j.at("local_path").get<std::string>();
  r.format_hint = required_enum<FormatHint>(j, "format_hint", parse_format_hint);
  r.script_hint = required_enum<ScriptHint>(j, "script_hint", parse_script_hint);
  r.scan_quality_hint = required_enum<ScanQualityHint>(j, "scan_quality_hint", parse_scan_quality_hint);
  r.script = required_enum<Script>(j, "script", parse_script);
  r.page_count = j.value("page_count", 0);
  r.state = required_enum<DocumentState>(j, "state", parse_document_state);
  if (j.contains("classification") && !j["classification"].is_null()) {
    r.classification = required_enum<Classification>(j, "classification", parse_classification);
  }
  if (j.contains("provenance") && !j["provenance"].is_null()) {
    r.provenance = required_enum<Provenance>(j, "provenance", parse_provenance);
  }
  return r;
}

}  // namespace

std::vector<DocumentRecord> load_records(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read record file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("corrupt record file " + path.string() + ": " + e.what());
  }
  std::vector<DocumentRecord> out;
  for (const auto& item : j.at("records")) {
    out.push_back(record_from_json(item));
    validate_record(out.back());
  }
  return out;
}

void save_records(const std::vector<DocumentRecord>& records, const fs::path& path) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) arr.push_back(to_json(r));
  const fs::path part = path.string() + ".part";
  {
    std::ofstream out(part, std::ios::trunc);
    if (!out) throw Error("cannot write " + part.string());
    out << nlohmann::json{{"records", arr}}.dump(2) << "\n";
  }
  fs::rename(part, path);
}

}  // namespace parlagest
