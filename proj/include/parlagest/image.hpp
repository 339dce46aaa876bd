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

#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "parlagest/error.hpp"
#include "parlagest/manifest.hpp"

namespace parlagest {

enum class PixelFormat { rgb, gray };
enum class ScanQuality { good, poor };

/// One rasterized page. Color pixels are stored in OpenCV's BGR order.
struct PageImage {
  std::string document_id;
  int page_index = 0;
  int dpi = 300;
  cv::Mat pixels;  // CV_8UC1 or CV_8UC3
  ScanQuality quality_class = ScanQuality::good;

  int width() const { return pixels.cols; }
  int height() const { return pixels.rows; }
  PixelFormat channels() const { return pixels.channels() == 1 ? PixelFormat::gray : PixelFormat::rgb; }
};

/// Thrown when page `page_index` cannot be rendered. The pages rendered
/// before it are kept in `rendered()`.
class RenderError : public DocumentError {
 public:
  RenderError(std::string document_id, int page_index, const std::string& what,
              std::vector<PageImage> rendered)
      : DocumentError(std::move(document_id), "page " + std::to_string(page_index) + ": " + what),
        page_index_(page_index),
        rendered_(std::move(rendered)) {}
  int page_index() const noexcept { return page_index_; }
  const std::vector<PageImage>& rendered() const noexcept { return rendered_; }

 private:
  int page_index_;
  std::vector<PageImage> rendered_;
};

/// Renders every page of a scanned document. Moves the record to `imaged`.
std::vector<PageImage> rasterize_pages(DocumentRecord& record, int dpi = 300);

inline constexpr double kNoiseThreshold = 0.002;

/// Share of pixels that are dark (< 128) with at least 7 light neighbours.
/// Neighbours outside the image count as light.
double isolated_dark_fraction(const cv::Mat& image);

struct QualitySplit {
  std::vector<PageImage> good;
  std::vector<PageImage> poor;
};

/// Partitions pages into good and poor scans. A hint other than `unknown`
/// decides for every page; otherwise the isolated-dark-pixel estimator does.
QualitySplit split_scan_quality(std::vector<PageImage> images, ScanQualityHint hint,
                                double threshold = kNoiseThreshold);

/// Luminosity conversion with weights 0.299/0.587/0.114, rounded to nearest.
cv::Mat to_gray(const cv::Mat& image);

/// Scale x2 (bicubic), gray, erode 3x3, dilate 3x3, median 3x3.
PageImage enhance_image(const PageImage& image);

/// Writes `page-NNNN.png` into `dir`, returning the file path.
std::filesystem::path save_page_png(const PageImage& image, const std::filesystem::path& dir);

}  // namespace parlagest
