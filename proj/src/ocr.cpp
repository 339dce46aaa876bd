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

#include "parlagest/ocr.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <opencv2/imgcodecs.hpp>

#include "parlagest/error.hpp"
#include "parlagest/parallel.hpp"
#include "parlagest/process.hpp"

namespace parlagest {

std::string_view to_string(OcrStrategy v) {
  return v == OcrStrategy::one_core_many_jobs ? "one_core_many_jobs" : "four_core_few_jobs";
}

std::string_view to_string(LanguageModel v) { return v == LanguageModel::deu ? "deu" : "deu_frak"; }

std::optional<OcrStrategy> parse_ocr_strategy(std::string_view s) {
  if (s == "one_core_many_jobs" || s == "one_core") return OcrStrategy::one_core_many_jobs;
  if (s == "four_core_few_jobs" || s == "four_core") return OcrStrategy::four_core_few_jobs;
  return std::nullopt;
}

LanguageModel language_model_for(Script script) {
  return script == Script::fraktur ? LanguageModel::deu_frak : LanguageModel::deu;
}

WorkerBudget compute_worker_budget(int total_threads, OcrStrategy strategy) {
  if (total_threads < 1) throw ValidationError("total_threads must be >= 1");
  WorkerBudget b;
  b.total_threads = total_threads;
  if (strategy == OcrStrategy::one_core_many_jobs) {
    b.engine_cores_per_job = 1;
    b.parallel_jobs = total_threads;
  } else {
    b.engine_cores_per_job = 4;
    // std::round rounds halves away from zero.
    b.parallel_jobs = std::max(1, static_cast<int>(std::round(total_threads / 4.0)));
  }
  return b;
}

OcrEngine OcrEngine::resolve(const std::string& name, std::vector<std::string> extra_args) {
  auto path = find_executable(name);
  if (!path) throw ConfigError("OCR engine '" + name + "' not found or not executable");
  OcrEngine e;
  e.executable_ = *path;
  e.extra_args_ = std::move(extra_args);
  return e;
}

std::string OcrEngine::recognize(const std::filesystem::path& image, LanguageModel model, int cores,
                                 const std::string& document_id, int page_index) const {
  const auto out_base = image.parent_path() / (image.stem().string() + "-out");
  std::vector<std::string> argv{executable_.string(), image.string(), out_base.string(), "-l",
                                std::string(to_string(model))};
  argv.insert(argv.end(), extra_args_.begin(), extra_args_.end());

  ProcessResult r;
  try {
    r = run_process(argv, {{"OMP_THREAD_LIMIT", std::to_string(cores)}});
  } catch (const std::exception& e) {
    throw OcrError(document_id, page_index, e.what(), "");
  }
  if (r.exit_code != 0) {
    throw OcrError(document_id, page_index, "engine exited with status " + std::to_string(r.exit_code),
                   r.stderr_text);
  }
  std::ifstream in(out_base.string() + ".txt", std::ios::binary);
  if (!in) throw OcrError(document_id, page_index, "engine produced no output file", r.stderr_text);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  while (!text.empty() && (text.back() == '\f' || std::isspace(static_cast<unsigned char>(text.back())))) {
    text.pop_back();
  }
  return text;
}

std::vector<std::string> run_ocr_pages(const OcrJob& job, const OcrEngine& engine, int parallel_jobs) {
  for (const auto& p : job.pages) {
    if (p.document_id != job.document_id) {
      throw PreconditionError(job.document_id + ": page " + std::to_string(p.page_index) +
                              " belongs to " + p.document_id);
    }
  }
  if (job.pages.empty()) return {};

  TempDir tmp("parlagest-ocr");
  auto one = [&](const PageImage& page) {
    char name[32];
    std::snprintf(name, sizeof name, "page-%05d.png", page.page_index);
    const auto png = tmp.path() / name;
    if (!cv::imwrite(png.string(), page.pixels)) {
      throw OcrError(job.document_id, page.page_index, "cannot write page image", "");
    }
    std::string text = engine.recognize(png, job.language_model, std::max(1, job.engine_cores),
                                         job.document_id, page.page_index);
    std::error_code ec;
    std::filesystem::remove(png, ec);
    return text;
  };
  return parallel_map(job.pages, static_cast<std::size_t>(std::max(1, parallel_jobs)), one);
}

std::string run_ocr(const OcrJob& job, const OcrEngine& engine, int parallel_jobs) {
  std::string out;
  const auto pages = run_ocr_pages(job, engine, parallel_jobs);
  for (std::size_t i = 0; i < pages.size(); ++i) {
    if (i) out.push_back('\f');
    out += pages[i];
  }
  return out;
}

}  // namespace parlagest
