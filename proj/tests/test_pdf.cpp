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

#include <opencv2/imgproc.hpp>

#include "parlagest/error.hpp"
#include "parlagest/pdf.hpp"

namespace {

using namespace parlagest;

TEST(Pdf, TextPagesRoundTrip) {
  pdf::Writer w;
  w.add_text_page({"Plenarprotokoll 17/1", "Stuttgart, Dienstag, 11. Mai 2021"});
  w.add_text_page({"Präsidentin Muhterem Aras: Die Sitzung ist geöffnet."});
  const auto doc = pdf::Document::from_bytes(w.bytes());
  ASSERT_EQ(doc.page_count(), 2);
  EXPECT_EQ(pdf::extract_page_text(doc, 0), "Plenarprotokoll 17/1\nStuttgart, Dienstag, 11. Mai 2021");
  EXPECT_EQ(pdf::extract_page_text(doc, 1), "Präsidentin Muhterem Aras: Die Sitzung ist geöffnet.");
}

TEST(Pdf, UncompressedOutputParsesToo) {
  pdf::Writer w;
  w.compress = false;
  w.add_text_page({"Ausschuss (Drucksache 17/42)"});
  const auto doc = pdf::Document::from_bytes(w.bytes());
  EXPECT_EQ(pdf::extract_page_text(doc, 0), "Ausschuss (Drucksache 17/42)");
}

TEST(Pdf, GrayImagePageRendersAtRequestedDpi) {
  cv::Mat img(220, 170, CV_8UC1, cv::Scalar(255));
  cv::rectangle(img, cv::Rect(20, 30, 60, 40), cv::Scalar(0), cv::FILLED);
  pdf::Writer w;
  w.add_image_page(img, pdf::PageSize{170 * 72.0 / 100, 220 * 72.0 / 100});
  const auto doc = pdf::Document::from_bytes(w.bytes());
  const cv::Mat out = pdf::render_page(doc, 0, 100);
  ASSERT_EQ(out.type(), CV_8UC1);
  ASSERT_EQ(out.size(), img.size());
  EXPECT_EQ(cv::norm(out, img, cv::NORM_INF), 0.0);
  EXPECT_EQ(pdf::extract_page_text(doc, 0), "");
}

TEST(Pdf, ColorImageStaysColor) {
  cv::Mat img(50, 40, CV_8UC3, cv::Scalar(10, 200, 30));
  pdf::Writer w;
  w.add_image_page(img, pdf::PageSize{40 * 72.0 / 50, 50 * 72.0 / 50});
  const cv::Mat out = pdf::render_page(pdf::Document::from_bytes(w.bytes()), 0, 50);
  ASSERT_EQ(out.type(), CV_8UC3);
  EXPECT_EQ(out.at<cv::Vec3b>(25, 20), cv::Vec3b(10, 200, 30));
}

TEST(Pdf, DctImagesDecode) {
  cv::Mat img(64, 64, CV_8UC1, cv::Scalar(128));
  pdf::Writer w;
  w.add_image_page(img, pdf::PageSize{64 * 72.0 / 64, 64 * 72.0 / 64}, pdf::Writer::ImageEncoding::dct);
  const cv::Mat out = pdf::render_page(pdf::Document::from_bytes(w.bytes()), 0, 64);
  EXPECT_LE(cv::norm(out, img, cv::NORM_INF), 3.0);
}

TEST(Pdf, PageSizeFollowsMediaBox) {
  pdf::Writer w;
  w.add_text_page({"x"}, 11.0, pdf::PageSize{300, 400});
  const auto [width, height] = pdf::page_size_pt(pdf::Document::from_bytes(w.bytes()), 0);
  EXPECT_DOUBLE_EQ(width, 300);
  EXPECT_DOUBLE_EQ(height, 400);
}

TEST(Pdf, GarbageIsRejected) {
  EXPECT_THROW(pdf::Document::from_bytes("not a pdf at all"), PdfError);
  pdf::Writer w;
  w.add_text_page({"abc"});
  auto bytes = w.bytes();
  bytes.resize(bytes.size() / 3);
  EXPECT_THROW(
      {
        const auto doc = pdf::Document::from_bytes(bytes);
        (void)pdf::extract_page_text(doc, 0);
      },
      PdfError);
}

TEST(Pdf, LexerReadsBasicObjects) {
  pdf::Lexer lex("<< /Type /Page /Count 3 /Kids [1 0 R 2 0 R] /Title (a\\(b\\)) >>");
  const auto obj = pdf::parse_object(lex);
  ASSERT_TRUE(obj.is_dict());
  EXPECT_TRUE(pdf::find(obj.dict(), "Type")->is_name("Page"));
  EXPECT_EQ(pdf::find(obj.dict(), "Count")->as_int(), 3);
  EXPECT_EQ(pdf::find(obj.dict(), "Kids")->array().size(), 2u);
  EXPECT_EQ(pdf::find(obj.dict(), "Title")->string(), "a(b)");
}

}  // namespace
