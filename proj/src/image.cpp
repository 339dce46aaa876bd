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

#include "parlagest/image.hpp"

#include <cmath>
#include <filesystem>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "parlagest/pdf.hpp"

namespace parlagest {

std::vector<PageImage> rasterize_pages(DocumentRecord& record, int dpi) {
  if (record.classification != Classification::scanned) {
    throw PreconditionError(record.id + ": rasterization requires a scanned document");
  }
  if (dpi < 1) throw ConfigError("dpi must be positive");

  std::optional<pdf::Document> doc;
  try {
    doc = pdf::Document::open(record.local_path);
  } catch (const std::exception& e) {
    throw RenderError(record.id, 0, e.what(), {});
  }

  std::vector<PageImage> pages;
  for (int p = 0; p < doc->page_count(); ++p) {
    PageImage img;
    img.document_id = record.id;
    img.page_index = p;
    img.dpi = dpi;
    try {
      img.pixels = pdf::render_page(*doc, p, dpi);
    } catch (const std::exception& e) {
      throw RenderError(record.id, p, e.what(), std::move(pages));
    }
    if (img.pixels.empty()) throw RenderError(record.id, p, "empty raster", std::move(pages));
    pages.push_back(std::move(img));
  }
  advance_state(record, DocumentState::imaged);
  return pages;
}

double isolated_dark_fraction(const cv::Mat& image) {
  const cv::Mat gray = image.channels() == 1 ? image : to_gray(image);
  const int rows = gray.rows;
  const int cols = gray.cols;
  if (rows == 0 || cols == 0) return 0.0;

  auto dark = [&](int y, int x) {
    return y >= 0 && y < rows && x >= 0 && x < cols && gray.at<std::uint8_t>(y, x) < 128;
  };
  std::size_t isolated = 0;
  for (int y = 0; y < rows; ++y) {
    const auto* row = gray.ptr<std::uint8_t>(y);
    for (int x = 0; x < cols; ++x) {
      if (row[x] >= 128) continue;
      int dark_neighbours = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          if ((dy || dx) && dark(y + dy, x + dx)) ++dark_neighbours;
      if (dark_neighbours <= 1) ++isolated;
    }
  }
  return static_cast<double>(isolated) / (static_cast<double>(rows) * cols);
}

QualitySplit split_scan_quality(std::vector<PageImage> images, ScanQualityHint hint, double threshold) {
  QualitySplit out;
  for (auto& img : images) {
    bool poor = false;
    switch (hint) {
      case ScanQualityHint::good: poor = false; break;
      case ScanQualityHint::poor: poor = true; break;
      case ScanQualityHint::unknown: poor = isolated_dark_fraction(img.pixels) > threshold; break;
    }
    img.quality_class = poor ? ScanQuality::poor : ScanQuality::good;
    (poor ? out.poor : out.good).push_back(std::move(img));
  }
  return out;
}

cv::Mat to_gray(const cv::Mat& image) {
  CV_Assert(image.depth() == CV_8U);
  if (image.channels() == 1) return image.clone();
  CV_Assert(image.channels() == 3 || image.channels() == 4);
  cv::Mat out(image.size(), CV_8UC1);
  const int cn = image.channels();
  for (int y = 0; y < image.rows; ++y) {
    const auto* src = image.ptr<std::uint8_t>(y);
    auto* dst = out.ptr<std::uint8_t>(y);
    for (int x = 0; x < image.cols; ++x) {
      const double b = src[x * cn], g = src[x * cn + 1], r = src[x * cn + 2];
      dst[x] = static_cast<std::uint8_t>(std::lround(std::clamp(0.299 * r + 0.587 * g + 0.114 * b, 0.0, 255.0)));
    }
  }
  return out;
}

PageImage enhance_image(const PageImage& image) {
  if (image.quality_class != ScanQuality::poor) {
    throw PreconditionError(image.document_id + ": enhancement applies to poor-quality scans only");
  }
  PageImage out;
  out.document_id = image.document_id;
  out.page_index = image.page_index;
  out.dpi = image.dpi * 2;
  out.quality_class = image.quality_class;

  cv::Mat scaled;
  cv::resize(image.pixels, scaled, cv::Size(), 2.0, 2.0, cv::INTER_CUBIC);
  cv::Mat gray = to_gray(scaled);
  const cv::Mat kernel = cv::getStructuringElement(cv::MORPH_RECT, cv::Size(3, 3));
  cv::erode(gray, gray, kernel, cv::Point(-1, -1), 1);
  cv::dilate(gray, gray, kernel, cv::Point(-1, -1), 1);
  cv::medianBlur(gray, out.pixels, 3);
  return out;
}

std::filesystem::path save_page_png(const PageImage& image, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  char name[32];
  std::snprintf(name, sizeof name, "page-%04d.png", image.page_index);
  const auto path = dir / name;
  if (!cv::imwrite(path.string(), image.pixels)) throw Error("cannot write " + path.string());
  return path;
}

}  // namespace parlagest
