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

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "parlagest/error.hpp"
#include "parlagest/pdf.hpp"
#include "parlagest/unicode.hpp"

namespace parlagest::pdf {
namespace {

std::string deflate_bytes(std::string_view in) {
  uLongf size = compressBound(static_cast<uLong>(in.size()));
  std::string out(size, '\0');
  if (compress2(reinterpret_cast<Bytef*>(out.data()), &size, reinterpret_cast<const Bytef*>(in.data()),
                static_cast<uLong>(in.size()), Z_BEST_SPEED) != Z_OK) {
    throw PdfError("deflate failed");
  }
  out.resize(size);
  return out;
}

// UTF-8 -> Windows-1252 bytes as a PDF literal string.
std::string literal(std::string_view utf8) {
  static constexpr char32_t kHigh[32] = {
      0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021, 0x02C6, 0x2030, 0x0160,
      0x2039, 0x0152, 0,      0x017D, 0,      0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022,
      0x2013, 0x2014, 0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x0178};
  std::string out = "(";
  for (char32_t c : unicode::decode(utf8)) {
    unsigned char b = '?';
    if (c < 0x80 || (c >= 0xA0 && c <= 0xFF)) {
      b = static_cast<unsigned char>(c);
    } else {
      for (int i = 0; i < 32; ++i) {
        if (kHigh[i] == c) b = static_cast<unsigned char>(0x80 + i);
      }
    }
    if (b == '(' || b == ')' || b == '\\') out.push_back('\\');
    out.push_back(static_cast<char>(b));
  }
  out.push_back(')');
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

void Writer::add_text_page(const std::vector<std::string>& lines, double font_size, PageSize size) {
  std::ostringstream content;
  const double leading = font_size * 1.3;
  content << "BT\n/F1 " << fmt(font_size) << " Tf\n" << fmt(leading) << " TL\n"
          << fmt(56.0) << ' ' << fmt(size.height_pt - 56.0 - font_size) << " Td\n";
  bool first = true;
  for (const auto& line : lines) {
    if (!first) content << "T*\n";
    first = false;
    content << literal(line) << " Tj\n";
  }
  content << "ET\n";
  PageSpec spec;
  spec.size = size;
  spec.content = content.str();
  spec.uses_font = true;
  pages_.push_back(std::move(spec));
}

void Writer::add_image_page(const cv::Mat& image, PageSize size, ImageEncoding encoding) {
  if (image.empty() || image.depth() != CV_8U || (image.channels() != 1 && image.channels() != 3)) {
    throw PdfError("add_image_page expects an 8-bit gray or BGR image");
  }
  PageSpec spec;
  spec.size = size;
  spec.content = "q\n" + fmt(size.width_pt) + " 0 0 " + fmt(size.height_pt) + " 0 0 cm\n/Im1 Do\nQ\n";
  std::ostringstream dict;
  dict << "/Type /XObject /Subtype /Image /Width " << image.cols << " /Height " << image.rows
       << " /BitsPerComponent 8 /ColorSpace " << (image.channels() == 1 ? "/DeviceGray" : "/DeviceRGB");
  if (encoding == ImageEncoding::dct) {
    std::vector<uchar> buf;
    cv::imencode(".jpg", image, buf, {cv::IMWRITE_JPEG_QUALITY, 92});
    spec.image_data.assign(buf.begin(), buf.end());
    dict << " /Filter /DCTDecode";
  } else {
    cv::Mat samples;
    if (image.channels() == 3) {
      cv::cvtColor(image, samples, cv::COLOR_BGR2RGB);
    } else {
      samples = image.isContinuous() ? image : image.clone();
    }
    if (!samples.isContinuous()) samples = samples.clone();
    std::string raw(reinterpret_cast<const char*>(samples.data), samples.total() * samples.elemSize());
    spec.image_data = deflate_bytes(raw);
    dict << " /Filter /FlateDecode";
  }
  spec.image_dict = dict.str();
  pages_.push_back(std::move(spec));
}

void Writer::add_raw_page(std::string content, PageSize size) {
  PageSpec spec;
  spec.size = size;
  spec.content = std::move(content);
  pages_.push_back(std::move(spec));
}

std::string Writer::bytes() const {
  std::string out = "%PDF-1.4\n%\xE2\xE3\xCF\xD3\n";
  std::vector<std::size_t> offsets;
  auto begin_obj = [&](int num) {
    if (static_cast<std::size_t>(num) > offsets.size()) offsets.resize(static_cast<std::size_t>(num));
    offsets[static_cast<std::size_t>(num - 1)] = out.size();
    out += std::to_string(num) + " 0 obj\n";
  };
  auto stream_obj = [&](int num, const std::string& dict, const std::string& data) {
    begin_obj(num);
    out += "<< " + dict + " /Length " + std::to_string(data.size()) + " >>\nstream\n";
    out += data;
    out += "\nendstream\nendobj\n";
  };

  // 1 catalog, 2 page tree, 3 font, then 3 objects per page.
  const int n = static_cast<int>(pages_.size());
  std::string kids;
  for (int i = 0; i < n; ++i) kids += std::to_string(4 + 3 * i) + " 0 R ";

  begin_obj(1);
  out += "<< /Type /Catalog /Pages 2 0 R >>\nendobj\n";
  begin_obj(2);
  out += "<< /Type /Pages /Kids [" + kids + "] /Count " + std::to_string(n) + " >>\nendobj\n";
  begin_obj(3);
  out += "<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica /Encoding /WinAnsiEncoding >>\nendobj\n";

  for (int i = 0; i < n; ++i) {
    const PageSpec& p = pages_[static_cast<std::size_t>(i)];
    const int page_num = 4 + 3 * i;
    std::string resources = "<<";
    if (p.uses_font) resources += " /Font << /F1 3 0 R >>";
    if (!p.image_data.empty()) resources += " /XObject << /Im1 " + std::to_string(page_num + 2) + " 0 R >>";
    resources += " >>";
    begin_obj(page_num);
    out += "<< /Type /Page /Parent 2 0 R /MediaBox [0 0 " + fmt(p.size.width_pt) + " " +
           fmt(p.size.height_pt) + "] /Resources " + resources + " /Contents " +
           std::to_string(page_num + 1) + " 0 R >>\nendobj\n";
    if (compress) {
      stream_obj(page_num + 1, "/Filter /FlateDecode", deflate_bytes(p.content));
    } else {
      stream_obj(page_num + 1, "", p.content);
    }
    if (p.image_data.empty()) {
      begin_obj(page_num + 2);
      out += "null\nendobj\n";
    } else {
      stream_obj(page_num + 2, p.image_dict, p.image_data);
    }
  }

  const std::size_t xref = out.size();
  out += "xref\n0 " + std::to_string(offsets.size() + 1) + "\n0000000000 65535 f \n";
  for (std::size_t off : offsets) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%010zu 00000 n \n", off);
    out += buf;
  }
  out += "trailer\n<< /Size " + std::to_string(offsets.size() + 1) + " /Root 1 0 R >>\nstartxref\n" +
         std::to_string(xref) + "\n%%EOF\n";
  return out;
}

void Writer::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PdfError("cannot write " + path.string());
  const auto data = bytes();
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

}  // namespace parlagest::pdf
