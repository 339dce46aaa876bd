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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parlagest/image.hpp"
#include "parlagest/types.hpp"

namespace parlagest {

enum class OcrStrategy { one_core_many_jobs, four_core_few_jobs };
enum class LanguageModel { deu, deu_frak };

std::string_view to_string(OcrStrategy v);
std::string_view to_string(LanguageModel v);
std::optional<OcrStrategy> parse_ocr_strategy(std::string_view s);

LanguageModel language_model_for(Script script);

struct WorkerBudget {
  int total_threads = 1;
  int engine_cores_per_job = 1;
  int parallel_jobs = 1;

  friend bool operator==(const WorkerBudget&, const WorkerBudget&) = default;
};

/// four_core_few_jobs: 4 engine cores, max(1, round(t / 4)) jobs with
/// halves rounded away from zero. one_core_many_jobs: 1 core, t jobs.
WorkerBudget compute_worker_budget(int total_threads, OcrStrategy strategy);

struct OcrJob {
  std::string document_id;
  std::vector<PageImage> pages;
  LanguageModel language_model = LanguageModel::deu;
  int engine_cores = 1;
};

/// An OCR executable speaking `<engine> <image> <out-base> -l <model> [extra...]`.
class OcrEngine {
 public:
  /// Looks `name` up on PATH (or takes it as a path). Throws ConfigError
  /// when it cannot be executed.
  static OcrEngine resolve(const std::string& name, std::vector<std::string> extra_args = {});

  const std::filesystem::path& executable() const noexcept { return executable_; }
  const std::vector<std::string>& extra_args() const noexcept { return extra_args_; }

  /// Recognizes one PNG file; returns the text with trailing whitespace
  /// and form feeds removed. Throws OcrError on a failed run.
  std::string recognize(const std::filesystem::path& image, LanguageModel model, int cores,
                        const std::string& document_id, int page_index) const;

 private:
  std::filesystem::path executable_;
  std::vector<std::string> extra_args_;
};

/// Runs the engine once per page on `parallel_jobs` workers. The result has
/// one string per page, in page order; blank pages give empty strings.
std::vector<std::string> run_ocr_pages(const OcrJob& job, const OcrEngine& engine,
                                       int parallel_jobs = 1);

/// Pages of run_ocr_pages joined with form feeds.
std::string run_ocr(const OcrJob& job, const OcrEngine& engine, int parallel_jobs = 1);

}  // namespace parlagest
