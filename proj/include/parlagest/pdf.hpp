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
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <opencv2/core.hpp>

// A small PDF reader: enough of ISO 32000 to count pages, pull text out of
// born-digital protocols and rasterize image-only (scanned) pages. Vector
// glyph rendering, encryption and JBIG2/CCITT images are not supported.
namespace parlagest::pdf {

class Object;

struct Null {
  friend bool operator==(Null, Null) { return true; }
};
struct Name {
  std::string value;
  friend bool operator==(const Name&, const Name&) = default;
};
struct String {
  std::string bytes;
  friend bool operator==(const String&, const String&) = default;
};
struct Ref {
  int num = 0;
  int gen = 0;
  friend bool operator==(const Ref&, const Ref&) = default;
};

using Array = std::vector<Object>;
using Dict = std::map<std::string, Object, std::less<>>;

struct Stream {
  Dict dict;
  std::string data;  // still encoded
};

class Object {
 public:
  using Value = std::variant<Null, bool, std::int64_t, double, String, Name, Ref,
                             std::shared_ptr<const Array>, std::shared_ptr<const Dict>,
                             std::shared_ptr<const Stream>>;

  Object() = default;
  Object(Value v) : value_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  static Object array(Array a) { return Object(std::make_shared<const Array>(std::move(a))); }
  static Object dict(Dict d) { return Object(std::make_shared<const Dict>(std::move(d))); }
  static Object stream(Stream s) { return Object(std::make_shared<const Stream>(std::move(s))); }

  bool is_null() const { return std::holds_alternative<Null>(value_); }
  bool is_bool() const { return std::holds_alternative<bool>(value_); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(value_); }
  bool is_number() const { return is_int() || std::holds_alternative<double>(value_); }
  bool is_string() const { return std::holds_alternative<String>(value_); }
  bool is_name() const { return std::holds_alternative<Name>(value_); }
  bool is_name(std::string_view n) const { return is_name() && name() == n; }
  bool is_ref() const { return std::holds_alternative<Ref>(value_); }
  bool is_array() const { return std::holds_alternative<std::shared_ptr<const Array>>(value_); }
  bool is_dict() const { return std::holds_alternative<std::shared_ptr<const Dict>>(value_); }
  bool is_stream() const { return std::holds_alternative<std::shared_ptr<const Stream>>(value_); }

  bool as_bool() const { return std::get<bool>(value_); }
  std::int64_t as_int() const;
  double as_number() const;
  const std::string& name() const { return std::get<Name>(value_).value; }
  const std::string& string() const { return std::get<String>(value_).bytes; }
  Ref ref() const { return std::get<Ref>(value_); }
  const Array& array() const { return *std::get<std::shared_ptr<const Array>>(value_); }
  /// Dictionary of a dict object, or the stream dictionary of a stream.
  const Dict& dict() const;
  const Stream& stream() const { return *std::get<std::shared_ptr<const Stream>>(value_); }

  const Value& value() const { return value_; }

 private:
  Value value_;
};

/// Entry of a dictionary, or nullptr.
const Object* find(const Dict& d, std::string_view key);

/// Tokenizer shared by the file parser and the content-stream interpreter.
class Lexer {
 public:
  enum class Kind {
    eof, integer, real, string, name, keyword,
    array_open, array_close, dict_open, dict_close,
  };
  struct Token {
    Kind kind = Kind::eof;
    std::string text;  // decoded bytes for strings/names, raw for keywords
    std::int64_t integer = 0;
    double real = 0.0;
    std::size_t begin = 0;
  };

  explicit Lexer(std::string_view data, std::size_t pos = 0) : data_(data), pos_(pos) {}

  Token next();
  std::size_t pos() const { return pos_; }
  void seek(std::size_t pos) { pos_ = pos; }
  std::string_view data() const { return data_; }
  void skip_whitespace();

 private:
  std::string_view data_;
  std::size_t pos_;
};

/// Parses one object; integers followed by `<gen> R` become references.
/// Throws PdfError on malformed input.
Object parse_object(Lexer& lexer);

/// Parses the object that starts with `first`.
Object parse_object(Lexer& lexer, Lexer::Token first);

/// A content-stream operation: operator keyword plus its operands. Inline
/// images arrive as operator "BI" with the image dictionary in
/// `inline_image` and the raw sample bytes in `inline_data`.
struct Operation {
  std::string op;
  std::vector<Object> operands;
  Dict inline_image;
  std::string inline_data;
};

void for_each_operation(std::string_view content, const std::function<void(const Operation&)>& fn);

/// Parsed PDF file. Objects are loaded eagerly on open and immutable
/// afterwards, so a Document may be read from several threads.
class Document {
 public:
  static Document open(const std::filesystem::path& path);
  static Document from_bytes(std::string bytes);

  int page_count() const;

  /// Page dictionary with inheritable attributes (Resources, MediaBox,
  /// CropBox, Rotate) resolved from ancestors.
  const Dict& page(int index) const;

  /// Follows indirect references; unknown objects resolve to null.
  Object resolve(const Object& obj) const;
  /// Resolved dictionary entry, or null.
  Object get(const Dict& d, std::string_view key) const;

  /// Applies the stream's filters. Image codecs (DCTDecode, JPXDecode,
  /// CCITTFaxDecode, JBIG2Decode) are left in place and reported through
  /// `image_filter`.
  struct Decoded {
    std::string data;
    std::string image_filter;
  };
  Decoded decode(const Stream& stream) const;

  /// Concatenated, decoded content streams of a page.
  std::string page_contents(int index) const;

 private:
  struct Impl;
  explicit Document(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Text of one page in content order, lines separated by '\n'.
std::string extract_page_text(const Document& doc, int page);

/// Rasterizes the images placed on a page onto a white canvas of the page's
/// size at `dpi`. Returns CV_8UC1 when every image is grayscale, CV_8UC3
/// (BGR) otherwise. Throws PdfError for unsupported image encodings.
cv::Mat render_page(const Document& doc, int page, int dpi);

/// Page width and height in points (CropBox when present, else MediaBox).
std::pair<double, double> page_size_pt(const Document& doc, int page);

/// Minimal PDF writer used to build fixtures: text pages in Helvetica with
/// WinAnsi encoding and image-only pages.
struct PageSize {
  double width_pt = 595.276;  // A4
  double height_pt = 841.89;
};

class Writer {
 public:
  using PageSize = pdf::PageSize;
  enum class ImageEncoding { flate, dct };

  bool compress = true;

  /// Lines are UTF-8; characters outside Windows-1252 become '?'.
  void add_text_page(const std::vector<std::string>& lines, double font_size = 11.0,
                     PageSize size = {});
  /// 8-bit gray (CV_8UC1) or BGR (CV_8UC3) image scaled to fill the page.
  void add_image_page(const cv::Mat& image, PageSize size = {},
                      ImageEncoding encoding = ImageEncoding::flate);
  /// Page with a caller-supplied content stream and no resources.
  void add_raw_page(std::string content, PageSize size = {});

  std::string bytes() const;
  void save(const std::filesystem::path& path) const;

 private:
  struct PageSpec {
    PageSize size;
    std::string content;
    bool uses_font = false;
    std::string image_dict;  // stream dictionary entries of the page image
    std::string image_data;
  };
  std::vector<PageSpec> pages_;
};

}  // namespace parlagest::pdf
