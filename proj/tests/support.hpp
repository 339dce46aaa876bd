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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <opencv2/core.hpp>

#include "parlagest/document.hpp"
#include "parlagest/manifest.hpp"

namespace testsupport {

std::filesystem::path test_data(std::string_view name);
std::filesystem::path source_dir();

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view data);

/// Renders lines of text in black on a white A4 canvas at `dpi`, wrapping
/// paragraphs to the text width. Paragraphs are separated by a blank line.
cv::Mat render_text_page(const std::vector<std::string>& paragraphs, int dpi, double font_pt = 12.0);

/// Sets `fraction` of the pixels to black and the same share to white.
void add_salt_and_pepper(cv::Mat& gray, double fraction, std::uint32_t seed);

/// Writes a PDF with one text page per entry.
void write_text_pdf(const std::filesystem::path& path, const std::vector<std::vector<std::string>>& pages);
/// Writes a PDF whose pages are the given images scaled to A4.
void write_image_pdf(const std::filesystem::path& path, const std::vector<cv::Mat>& pages);

parlagest::DocumentRecord record_for(const std::filesystem::path& pdf, const std::string& id,
                                     const std::string& parliament = "Testland");

// Independent oracles.
int reference_osa(const std::u32string& a, const std::u32string& b);
struct BruteForceHit {
  std::u32string word;
  int distance;
  std::uint64_t frequency;
};
std::optional<BruteForceHit> brute_force_lookup(const std::vector<std::pair<std::u32string, std::uint64_t>>& dict,
                                                const std::u32string& query, int max_distance);

cv::Mat reference_erode3(const cv::Mat& gray);   // minimum over in-bounds 3x3 neighbours
cv::Mat reference_dilate3(const cv::Mat& gray);  // maximum over in-bounds 3x3 neighbours
cv::Mat reference_median3(const cv::Mat& gray);  // replicated border

std::int64_t timegm_ms(int day, int month, int year);

/// Canonical text of an XML document: one element per line in document
/// order, names as {namespace}local, attributes sorted, character content
/// dropped when it is only whitespace.
std::string canonical_xml(std::string_view xml);

/// OCR executable usable for the CLI contract: $PARLAGEST_TEST_OCR_ENGINE,
/// a `tesseract` on PATH, or the bundled shim when tesserocr and the deu
/// model are importable. nullopt when none works.
std::optional<std::string> ocr_engine();

/// Sofa of 48,634 characters with the sentence
/// "Alterspräsident Winfried Kretschmann: Meine sehr verehrten Damen und
/// Herren, liebe Kolleginnen und Kollegen!" at [2733, 2841), carrying
/// lemma, POS, morphology and dependency layers and session metadata for
/// 11.05.2021 (17th legislature, 1st session).
parlagest::AnnotatedDocument session_opening_document();

/// Small valid document with every layer populated at random: at most 20
/// tokens over a sofa mixing umlauts, XML metacharacters, tabs and newlines.
parlagest::AnnotatedDocument random_document(std::mt19937& rng);

/// Three paragraphs of plain German prose used by the OCR fixtures.
std::vector<std::string> german_paragraphs();

}  // namespace testsupport
