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

#include <cmath>
#include <cstdlib>

#include "parlagest/error.hpp"
#include "parlagest/pdf.hpp"

namespace parlagest::pdf {
namespace {

bool is_white(char c) {
  return c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '\f' || c == '\0';
}

bool is_delim(char c) {
  switch (c) {
    case '(': case ')': case '<': case '>': case '[': case ']':
    case '{': case '}': case '/': case '%':
      return true;
    default:
      return false;
  }
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::int64_t Object::as_int() const {
  if (auto* i = std::get_if<std::int64_t>(&value_)) return *i;
  if (auto* d = std::get_if<double>(&value_)) return static_cast<std::int64_t>(std::llround(*d));
  throw PdfError("expected an integer");
}

double Object::as_number() const {
  if (auto* i = std::get_if<std::int64_t>(&value_)) return static_cast<double>(*i);
  if (auto* d = std::get_if<double>(&value_)) return *d;
  throw PdfError("expected a number");
}

const Dict& Object::dict() const {
  if (auto* d = std::get_if<std::shared_ptr<const Dict>>(&value_)) return **d;
  if (auto* s = std::get_if<std::shared_ptr<const Stream>>(&value_)) return (*s)->dict;
  throw PdfError("expected a dictionary");
}

const Object* find(const Dict& d, std::string_view key) {
  auto it = d.find(key);
  return it == d.end() ? nullptr : &it->second;
}

void Lexer::skip_whitespace() {
  while (pos_ < data_.size()) {
    const char c = data_[pos_];
    if (is_white(c)) {
      ++pos_;
    } else if (c == '%') {
      while (pos_ < data_.size() && data_[pos_] != '\n' && data_[pos_] != '\r') ++pos_;
    } else {
      break;
    }
  }
}

Lexer::Token Lexer::next() {
  skip_whitespace();
  Token tok;
  tok.begin = pos_;
  if (pos_ >= data_.size()) return tok;

  const char c = data_[pos_];
  if (c == '[') {
    ++pos_;
    tok.kind = Kind::array_open;
    return tok;
  }
  if (c == ']') {
    ++pos_;
    tok.kind = Kind::array_close;
    return tok;
  }
  if (c == '<' && pos_ + 1 < data_.size() && data_[pos_ + 1] == '<') {
    pos_ += 2;
    tok.kind = Kind::dict_open;
    return tok;
  }
  if (c == '>' && pos_ + 1 < data_.size() && data_[pos_ + 1] == '>') {
    pos_ += 2;
    tok.kind = Kind::dict_close;
    return tok;
  }
  if (c == '<') {
    ++pos_;
    tok.kind = Kind::string;
    int hi = -1;
    while (pos_ < data_.size() && data_[pos_] != '>') {
      const int v = hex_value(data_[pos_++]);
      if (v < 0) continue;
      if (hi < 0) {
        hi = v;
      } else {
        tok.text.push_back(static_cast<char>(hi * 16 + v));
        hi = -1;
      }
    }
    if (hi >= 0) tok.text.push_back(static_cast<char>(hi * 16));
    if (pos_ < data_.size()) ++pos_;
    return tok;
  }
  if (c == '(') {
    ++pos_;
    tok.kind = Kind::string;
    int depth = 1;
    while (pos_ < data_.size()) {
      char ch = data_[pos_++];
      if (ch == '(') {
        ++depth;
      } else if (ch == ')') {
        if (--depth == 0) break;
      } else if (ch == '\\' && pos_ < data_.size()) {
        const char e = data_[pos_++];
        switch (e) {
          case 'n': tok.text.push_back('\n'); continue;
          case 'r': tok.text.push_back('\r'); continue;
          case 't': tok.text.push_back('\t'); continue;
          case 'b': tok.text.push_back('\b'); continue;
          case 'f': tok.text.push_back('\f'); continue;
          case '\r':
            if (pos_ < data_.size() && data_[pos_] == '\n') ++pos_;
            continue;
          case '\n':
            continue;
          default:
            break;
        }
        if (e >= '0' && e <= '7') {
          int v = e - '0';
          for (int k = 0; k < 2 && pos_ < data_.size() && data_[pos_] >= '0' && data_[pos_] <= '7'; ++k) {
            v = v * 8 + (data_[pos_++] - '0');
          }
          tok.text.push_back(static_cast<char>(v & 0xFF));
        } else {
          tok.text.push_back(e);
        }
        continue;
      } else if (ch == '\r') {
        if (pos_ < data_.size() && data_[pos_] == '\n') ++pos_;
        ch = '\n';
      }
      tok.text.push_back(ch);
    }
    return tok;
  }
  if (c == '/') {
    ++pos_;
    tok.kind = Kind::name;
    while (pos_ < data_.size() && !is_white(data_[pos_]) && !is_delim(data_[pos_])) {
      char ch = data_[pos_++];
      if (ch == '#' && pos_ + 1 < data_.size()) {
        const int hi = hex_value(data_[pos_]);
        const int lo = hex_value(data_[pos_ + 1]);
        if (hi >= 0 && lo >= 0) {
          ch = static_cast<char>(hi * 16 + lo);
          pos_ += 2;
        }
      }
      tok.text.push_back(ch);
    }
    return tok;
  }
  if (c == '{' || c == '}' || c == ')' || c == '>') {
    ++pos_;
    tok.kind = Kind::keyword;
    tok.text = std::string(1, c);
    return tok;
  }

  const std::size_t start = pos_;
  while (pos_ < data_.size() && !is_white(data_[pos_]) && !is_delim(data_[pos_])) ++pos_;
  tok.text = std::string(data_.substr(start, pos_ - start));

  // Numbers: [+-]? digits [. digits]
  const std::string& t = tok.text;
  bool numeric = !t.empty();
  bool has_dot = false;
  bool has_digit = false;
  for (std::size_t i = 0; i < t.size() && numeric; ++i) {
    const char ch = t[i];
    if (ch >= '0' && ch <= '9') {
      has_digit = true;
    } else if (ch == '.' && !has_dot) {
      has_dot = true;
    } else if ((ch == '-' || ch == '+') && i == 0) {
    } else {
      numeric = false;
    }
  }
  if (numeric && has_digit) {
    if (has_dot) {
      tok.kind = Kind::real;
      tok.real = std::strtod(t.c_str(), nullptr);
    } else {
      tok.kind = Kind::integer;
      tok.integer = std::strtoll(t.c_str(), nullptr, 10);
      tok.real = static_cast<double>(tok.integer);
    }
    return tok;
  }
  tok.kind = Kind::keyword;
  return tok;
}

Object parse_object(Lexer& lexer) { return parse_object(lexer, lexer.next()); }

Object parse_object(Lexer& lexer, Lexer::Token first) {
  using K = Lexer::Kind;
  switch (first.kind) {
    case K::integer: {
      const std::size_t save = lexer.pos();
      const auto gen = lexer.next();
      if (gen.kind == K::integer) {
        const auto r = lexer.next();
        if (r.kind == K::keyword && r.text == "R") {
          return Object(Ref{static_cast<int>(first.integer), static_cast<int>(gen.integer)});
        }
      }
      lexer.seek(save);
      return Object(first.integer);
    }
    case K::real:
      return Object(first.real);
    case K::string:
      return Object(String{std::move(first.text)});
    case K::name:
      return Object(Name{std::move(first.text)});
    case K::array_open: {
      Array items;
      for (;;) {
        auto tok = lexer.next();
        if (tok.kind == K::array_close) break;
        if (tok.kind == K::eof) throw PdfError("unterminated array");
        items.push_back(parse_object(lexer, std::move(tok)));
      }
      return Object::array(std::move(items));
    }
    case K::dict_open: {
      Dict entries;
      for (;;) {
        auto key = lexer.next();
        if (key.kind == K::dict_close) break;
        if (key.kind == K::eof) throw PdfError("unterminated dictionary");
        if (key.kind != K::name) throw PdfError("dictionary key is not a name");
        auto value_tok = lexer.next();
        if (value_tok.kind == K::dict_close) {
          entries[key.text] = Object();
          break;
        }
        entries[key.text] = parse_object(lexer, std::move(value_tok));
      }
      return Object::dict(std::move(entries));
    }
    case K::keyword:
      if (first.text == "true") return Object(true);
      if (first.text == "false") return Object(false);
      if (first.text == "null") return Object();
      throw PdfError("unexpected keyword '" + first.text + "'");
    case K::eof:
      throw PdfError("unexpected end of data");
    default:
      throw PdfError("unexpected token");
  }
}

namespace {

// Locates the end of inline image data: "EI" between whitespace.
std::size_t find_inline_image_end(std::string_view data, std::size_t from) {
  for (std::size_t i = from; i + 1 < data.size(); ++i) {
    if (data[i] == 'E' && data[i + 1] == 'I' && i > from && is_white(data[i - 1]) &&
        (i + 2 >= data.size() || is_white(data[i + 2]) || is_delim(data[i + 2]))) {
      return i;
    }
  }
  return std::string_view::npos;
}

}  // namespace

void for_each_operation(std::string_view content, const std::function<void(const Operation&)>& fn) {
  using K = Lexer::Kind;
  Lexer lexer(content);
  Operation op;
  for (;;) {
    auto tok = lexer.next();
    if (tok.kind == K::eof) break;
    if (tok.kind == K::keyword) {
      if (tok.text == "BI") {
        Operation image;
        image.op = "BI";
        for (;;) {
          auto key = lexer.next();
          if (key.kind == K::eof) return;
          if (key.kind == K::keyword && key.text == "ID") break;
          if (key.kind != K::name) continue;
          try {
            image.inline_image[key.text] = parse_object(lexer);
          } catch (const PdfError&) {
            return;
          }
        }
        std::size_t start = lexer.pos();
        if (start < content.size() && is_white(content[start])) ++start;
        std::size_t end = std::string_view::npos;
        const Object* len = find(image.inline_image, "L");
        if (!len) len = find(image.inline_image, "Length");
        if (len && len->is_int() && start + static_cast<std::size_t>(len->as_int()) <= content.size()) {
          end = start + static_cast<std::size_t>(len->as_int());
          image.inline_data = std::string(content.substr(start, end - start));
          const auto ei = find_inline_image_end(content, end > 0 ? end - 1 : 0);
          lexer.seek(ei == std::string_view::npos ? content.size() : ei + 2);
        } else {
          end = find_inline_image_end(content, start);
          if (end == std::string_view::npos) return;
          std::size_t data_end = end - 1;  // whitespace before EI
          image.inline_data = std::string(content.substr(start, data_end - start));
          lexer.seek(end + 2);
        }
        fn(image);
        op = Operation{};
        continue;
      }
      op.op = std::move(tok.text);
      fn(op);
      op = Operation{};
      continue;
    }
    try {
      op.operands.push_back(parse_object(lexer, std::move(tok)));
    } catch (const PdfError&) {
      op.operands.clear();
    }
  }
}

}  // namespace parlagest::pdf
