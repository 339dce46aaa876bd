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

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <unordered_map>

#include "parlagest/error.hpp"
#include "parlagest/pdf.hpp"
#include "parlagest/unicode.hpp"

namespace parlagest::pdf {
namespace {

// Windows-1252 code points 0x80..0x9F (0 = undefined).
constexpr std::array<char32_t, 32> kWinAnsiHigh = {
    0x20AC, 0,      0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021,
    0x02C6, 0x2030, 0x0160, 0x2039, 0x0152, 0,      0x017D, 0,
    0,      0x2018, 0x2019, 0x201C, 0x201D, 0x2022, 0x2013, 0x2014,
    0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0,      0x017E, 0x0178};

// Mac OS Roman 0x80..0xFF.
constexpr std::array<char32_t, 128> kMacRomanHigh = {
    0x00C4, 0x00C5, 0x00C7, 0x00C9, 0x00D1, 0x00D6, 0x00DC, 0x00E1, 0x00E0, 0x00E2, 0x00E4,
    0x00E3, 0x00E5, 0x00E7, 0x00E9, 0x00E8, 0x00EA, 0x00EB, 0x00ED, 0x00EC, 0x00EE, 0x00EF,
    0x00F1, 0x00F3, 0x00F2, 0x00F4, 0x00F6, 0x00F5, 0x00FA, 0x00F9, 0x00FB, 0x00FC, 0x2020,
    0x00B0, 0x00A2, 0x00A3, 0x00A7, 0x2022, 0x00B6, 0x00DF, 0x00AE, 0x00A9, 0x2122, 0x00B4,
    0x00A8, 0x2260, 0x00C6, 0x00D8, 0x221E, 0x00B1, 0x2264, 0x2265, 0x00A5, 0x00B5, 0x2202,
    0x2211, 0x220F, 0x03C0, 0x222B, 0x00AA, 0x00BA, 0x03A9, 0x00E6, 0x00F8, 0x00BF, 0x00A1,
    0x00AC, 0x221A, 0x0192, 0x2248, 0x2206, 0x00AB, 0x00BB, 0x2026, 0x00A0, 0x00C0, 0x00C3,
    0x00D5, 0x0152, 0x0153, 0x2013, 0x2014, 0x201C, 0x201D, 0x2018, 0x2019, 0x00F7, 0x25CA,
    0x00FF, 0x0178, 0x2044, 0x20AC, 0x2039, 0x203A, 0xFB01, 0xFB02, 0x2021, 0x00B7, 0x201A,
    0x201E, 0x2030, 0x00C2, 0x00CA, 0x00C1, 0x00CB, 0x00C8, 0x00CD, 0x00CE, 0x00CF, 0x00CC,
    0x00D3, 0x00D4, 0xF8FF, 0x00D2, 0x00DA, 0x00DB, 0x00D9, 0x0131, 0x02C6, 0x02DC, 0x00AF,
    0x02D8, 0x02D9, 0x02DA, 0x00B8, 0x02DD, 0x02DB, 0x02C7};

// Adobe StandardEncoding entries that differ from Latin-1 (code, unicode).
constexpr std::array<std::pair<unsigned char, char32_t>, 66> kStandardHigh = {{
    {0x27, 0x2019}, {0x60, 0x2018}, {0xA1, 0x00A1}, {0xA2, 0x00A2}, {0xA3, 0x00A3},
    {0xA4, 0x2044}, {0xA5, 0x00A5}, {0xA6, 0x0192}, {0xA7, 0x00A7}, {0xA8, 0x00A4},
    {0xA9, 0x0027}, {0xAA, 0x201C}, {0xAB, 0x00AB}, {0xAC, 0x2039}, {0xAD, 0x203A},
    {0xAE, 0xFB01}, {0xAF, 0xFB02}, {0xB1, 0x2013}, {0xB2, 0x2020}, {0xB3, 0x2021},
    {0xB4, 0x00B7}, {0xB6, 0x00B6}, {0xB7, 0x2022}, {0xB8, 0x201A}, {0xB9, 0x201E},
    {0xBA, 0x201D}, {0xBB, 0x00BB}, {0xBC, 0x2026}, {0xBD, 0x2030}, {0xBF, 0x00BF},
    {0xC1, 0x0060}, {0xC2, 0x00B4}, {0xC3, 0x02C6}, {0xC4, 0x02DC}, {0xC5, 0x00AF},
    {0xC6, 0x02D8}, {0xC7, 0x02D9}, {0xC8, 0x00A8}, {0xCA, 0x02DA}, {0xCB, 0x00B8},
    {0xCD, 0x02DD}, {0xCE, 0x02DB}, {0xCF, 0x02C7}, {0xD0, 0x2014}, {0xE1, 0x00C6},
    {0xE3, 0x00AA}, {0xE8, 0x0141}, {0xE9, 0x00D8}, {0xEA, 0x0152}, {0xEB, 0x00BA},
    {0xF1, 0x00E6}, {0xF5, 0x0131}, {0xF8, 0x0142}, {0xF9, 0x00F8}, {0xFA, 0x0153},
    {0xFB, 0x00DF}, {0x20, 0x0020}, {0x2D, 0x002D}, {0x22, 0x0022}, {0x5C, 0x005C},
    {0x5E, 0x005E}, {0x5F, 0x005F}, {0x7B, 0x007B}, {0x7C, 0x007C}, {0x7D, 0x007D},
    {0x7E, 0x007E},
}};

// Helvetica advance widths for 0x20..0x7E (1/1000 em).
constexpr std::array<int, 95> kHelveticaWidths = {
    278, 278, 355, 556, 556, 889, 667, 191, 333, 333, 389, 584, 278, 333, 278, 278, 556, 556, 556,
    556, 556, 556, 556, 556, 556, 556, 278, 278, 584, 584, 584, 556, 1015, 667, 667, 722, 722, 667,
    611, 778, 722, 278, 500, 667, 556, 833, 722, 778, 667, 778, 722, 667, 611, 722, 667, 944, 667,
    667, 611, 278, 278, 278, 469, 556, 333, 556, 556, 500, 556, 556, 278, 556, 556, 222, 222, 500,
    222, 833, 556, 556, 556, 556, 333, 500, 278, 556, 500, 722, 500, 500, 500, 334, 260, 334, 584};

const std::unordered_map<std::string, std::u32string>& glyph_names() {
  static const auto* table = [] {
    auto* m = new std::unordered_map<std::string, std::u32string>{
        {"space", U" "}, {"exclam", U"!"}, {"quotedbl", U"\""}, {"numbersign", U"#"},
        {"dollar", U"$"}, {"percent", U"%"}, {"ampersand", U"&"}, {"quotesingle", U"'"},
        {"quoteright", U"’"}, {"quoteleft", U"‘"}, {"parenleft", U"("},
        {"parenright", U")"}, {"asterisk", U"*"}, {"plus", U"+"}, {"comma", U","},
        {"hyphen", U"-"}, {"minus", U"−"}, {"period", U"."}, {"slash", U"/"},
        {"zero", U"0"}, {"one", U"1"}, {"two", U"2"}, {"three", U"3"}, {"four", U"4"},
        {"five", U"5"}, {"six", U"6"}, {"seven", U"7"}, {"eight", U"8"}, {"nine", U"9"},
        {"colon", U":"}, {"semicolon", U";"}, {"less", U"<"}, {"equal", U"="},
        {"greater", U">"}, {"question", U"?"}, {"at", U"@"}, {"bracketleft", U"["},
        {"backslash", U"\\"}, {"bracketright", U"]"}, {"asciicircum", U"^"},
        {"underscore", U"_"}, {"grave", U"`"}, {"braceleft", U"{"}, {"bar", U"|"},
        {"braceright", U"}"}, {"asciitilde", U"~"}, {"Adieresis", U"Ä"},
        {"Odieresis", U"Ö"}, {"Udieresis", U"Ü"}, {"adieresis", U"ä"},
        {"odieresis", U"ö"}, {"udieresis", U"ü"}, {"germandbls", U"ß"},
        {"eacute", U"é"}, {"egrave", U"è"}, {"ecircumflex", U"ê"},
        {"Eacute", U"É"}, {"aacute", U"á"}, {"agrave", U"à"},
        {"acircumflex", U"â"}, {"ccedilla", U"ç"}, {"iacute", U"í"},
        {"oacute", U"ó"}, {"uacute", U"ú"}, {"ntilde", U"ñ"},
        {"quotedblleft", U"“"}, {"quotedblright", U"”"},
        {"quotedblbase", U"„"}, {"quotesinglbase", U"‚"},
        {"guillemotleft", U"«"}, {"guillemotright", U"»"},
        {"guilsinglleft", U"‹"}, {"guilsinglright", U"›"}, {"endash", U"–"},
        {"emdash", U"\u2014"}, {"bullet", U"•"}, {"ellipsis", U"…"},
        {"section", U"§"}, {"paragraph", U"¶"}, {"degree", U"°"},
        {"Euro", U"€"}, {"dagger", U"†"}, {"daggerdbl", U"‡"},
        {"periodcentered", U"·"}, {"fi", U"fi"}, {"fl", U"fl"}, {"ff", U"ff"},
        {"ffi", U"ffi"}, {"ffl", U"ffl"}, {"nbspace", U" "}, {"sfthyphen", U"­"},
        {"copyright", U"©"}, {"registered", U"®"}, {"trademark", U"™"},
        {"multiply", U"×"}, {"divide", U"÷"}, {"onehalf", U"½"},
        {"onequarter", U"¼"}, {"threequarters", U"¾"},
    };
    for (char c = 'A'; c <= 'Z'; ++c) (*m)[std::string(1, c)] = std::u32string(1, c);
    for (char c = 'a'; c <= 'z'; ++c) (*m)[std::string(1, c)] = std::u32string(1, c);
    return m;
  }();
  return *table;
}

std::u32string glyph_to_unicode(const std::string& name) {
  const auto& table = glyph_names();
  if (auto it = table.find(name); it != table.end()) return it->second;
  auto parse_hex = [](std::string_view h) -> std::optional<char32_t> {
    if (h.empty() || h.size() > 6) return std::nullopt;
    char32_t v = 0;
    for (char c : h) {
      v <<= 4;
      if (c >= '0' && c <= '9') v |= static_cast<char32_t>(c - '0');
      else if (c >= 'A' && c <= 'F') v |= static_cast<char32_t>(c - 'A' + 10);
      else if (c >= 'a' && c <= 'f') v |= static_cast<char32_t>(c - 'a' + 10);
      else return std::nullopt;
    }
    return v;
  };
  if (name.rfind("uni", 0) == 0 && name.size() >= 7) {
    if (auto v = parse_hex(std::string_view(name).substr(3, 4))) return std::u32string(1, *v);
  }
  if (name.size() >= 5 && name[0] == 'u') {
    if (auto v = parse_hex(std::string_view(name).substr(1))) return std::u32string(1, *v);
  }
  // Base name before a suffix such as "a.sc".
  if (auto dot = name.find('.'); dot != std::string::npos && dot > 0) {
    return glyph_to_unicode(name.substr(0, dot));
  }
  return {};
}

std::u32string utf16be_to_u32(std::string_view bytes) {
  std::u32string out;
  for (std::size_t i = 0; i + 1 < bytes.size(); i += 2) {
    char32_t u = (static_cast<unsigned char>(bytes[i]) << 8) | static_cast<unsigned char>(bytes[i + 1]);
    if (u >= 0xD800 && u <= 0xDBFF && i + 3 < bytes.size()) {
      const char32_t lo = (static_cast<unsigned char>(bytes[i + 2]) << 8) |
                          static_cast<unsigned char>(bytes[i + 3]);
      if (lo >= 0xDC00 && lo <= 0xDFFF) {
        u = 0x10000 + ((u - 0xD800) << 10) + (lo - 0xDC00);
        i += 2;
      }
    }
    out.push_back(u);
  }
  return out;
}

std::uint32_t code_of(std::string_view bytes) {
  std::uint32_t v = 0;
  for (char c : bytes) v = (v << 8) | static_cast<unsigned char>(c);
  return v;
}

struct CMapData {
  int code_bytes = 0;  // 0 when no codespace was declared
  std::map<std::uint32_t, std::u32string> map;
};

CMapData parse_cmap(std::string_view data) {
  CMapData cmap;
  Lexer lexer(data);
  using K = Lexer::Kind;
  for (;;) {
    auto tok = lexer.next();
    if (tok.kind == K::eof) break;
    if (tok.kind != K::keyword) continue;
    if (tok.text == "begincodespacerange") {
      for (;;) {
        auto lo = lexer.next();
        if (lo.kind != K::string) break;
        auto hi = lexer.next();
        if (cmap.code_bytes == 0) cmap.code_bytes = static_cast<int>(lo.text.size());
        (void)hi;
      }
    } else if (tok.text == "beginbfchar") {
      for (;;) {
        auto src = lexer.next();
        if (src.kind != K::string) break;
        auto dst = lexer.next();
        if (dst.kind == K::string) {
          cmap.map[code_of(src.text)] = utf16be_to_u32(dst.text);
        } else if (dst.kind == K::name) {
          cmap.map[code_of(src.text)] = glyph_to_unicode(dst.text);
        }
      }
    } else if (tok.text == "beginbfrange") {
      for (;;) {
        auto lo = lexer.next();
        if (lo.kind != K::string) break;
        auto hi = lexer.next();
        auto dst = lexer.next();
        const auto first = code_of(lo.text);
        const auto last = code_of(hi.text);
        if (last < first || last - first > 0xFFFF) continue;
        if (dst.kind == K::string) {
          std::u32string base = utf16be_to_u32(dst.text);
          if (base.empty()) continue;
          for (std::uint32_t c = first; c <= last; ++c) {
            cmap.map[c] = base;
            ++base.back();
          }
        } else if (dst.kind == K::array_open) {
          std::uint32_t c = first;
          for (;;) {
            auto item = lexer.next();
            if (item.kind != K::string) break;
            cmap.map[c++] = utf16be_to_u32(item.text);
          }
        }
      }
    }
  }
  return cmap;
}

struct Font {
  int code_bytes = 1;
  std::array<std::u32string, 256> simple;
  std::map<std::uint32_t, std::u32string> to_unicode;
  std::map<std::uint32_t, double> widths;  // glyph space / 1000
  double default_width = 0.5;
  double width_scale = 1.0;  // Type3 FontMatrix adjustment

  std::u32string text(std::uint32_t code) const {
    if (auto it = to_unicode.find(code); it != to_unicode.end()) return it->second;
    if (code_bytes == 1 && code < 256) return simple[code];
    return {};
  }
  double width(std::uint32_t code) const {
    if (auto it = widths.find(code); it != widths.end()) return it->second * width_scale;
    return default_width * width_scale;
  }
};

void apply_base_encoding(Font& font, std::string_view base) {
  for (int c = 0; c < 256; ++c) {
    char32_t u = 0;
    if (c >= 0x20 && c < 0x7F) {
      u = static_cast<char32_t>(c);
    } else if (c >= 0xA0) {
      u = static_cast<char32_t>(c);
    }
    if (base == "MacRomanEncoding") {
      if (c >= 0x80) u = kMacRomanHigh[c - 0x80];
    } else if (base == "StandardEncoding") {
      if (c >= 0x80) u = 0;
    } else if (c >= 0x80 && c < 0xA0) {
      u = kWinAnsiHigh[c - 0x80];
    }
    font.simple[c] = u ? std::u32string(1, u) : std::u32string();
  }
  if (base == "StandardEncoding") {
    for (const auto& [code, u] : kStandardHigh) font.simple[code] = std::u32string(1, u);
  }
}

class FontCache {
 public:
  explicit FontCache(const Document& doc) : doc_(doc) {}

  const Font& get(const Object& font_ref) {
    const void* key = nullptr;
    if (font_ref.is_ref()) {
      key = reinterpret_cast<const void*>(static_cast<std::intptr_t>(font_ref.ref().num + 1));
    }
    if (key) {
      if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    Font f = load(doc_.resolve(font_ref));
    if (!key) {
      scratch_ = std::move(f);
      return scratch_;
    }
    return cache_.emplace(key, std::move(f)).first->second;
  }

 private:
  Font load(const Object& obj) {
    Font font;
    if (!obj.is_dict()) {
      apply_base_encoding(font, "StandardEncoding");
      return font;
    }
    const Dict& d = obj.dict();
    const Object subtype = doc_.get(d, "Subtype");
    const Object base_font = doc_.get(d, "BaseFont");
    const std::string base_name = base_font.is_name() ? base_font.name() : std::string();

    if (subtype.is_name("Type0")) {
      font.code_bytes = 2;
      const Object enc = doc_.get(d, "Encoding");
      if (enc.is_stream()) {
        const auto cm = parse_cmap(doc_.decode(enc.stream()).data);
        if (cm.code_bytes > 0) font.code_bytes = cm.code_bytes;
      }
      font.default_width = 1.0;
      const Object descendants = doc_.get(d, "DescendantFonts");
      if (descendants.is_array() && !descendants.array().empty()) {
        const Object cid = doc_.resolve(descendants.array()[0]);
        if (cid.is_dict()) {
          const Object dw = doc_.get(cid.dict(), "DW");
          if (dw.is_number()) font.default_width = dw.as_number() / 1000.0;
          const Object w = doc_.get(cid.dict(), "W");
          if (w.is_array()) load_cid_widths(font, w.array());
        }
      }
    } else {
      std::string base_encoding = "StandardEncoding";
      if (base_name.find("Symbol") == std::string::npos &&
          base_name.find("Dingbats") == std::string::npos) {
        // Non-symbolic fonts without an explicit encoding are read as WinAnsi
        // for robustness; most producers of German text embed Latin fonts.
        base_encoding = "WinAnsiEncoding";
      }
      const Object enc = doc_.get(d, "Encoding");
      Array differences;
      if (enc.is_name()) {
        base_encoding = enc.name();
      } else if (enc.is_dict()) {
        const Object be = doc_.get(enc.dict(), "BaseEncoding");
        if (be.is_name()) base_encoding = be.name();
        const Object diffs = doc_.get(enc.dict(), "Differences");
        if (diffs.is_array()) differences = diffs.array();
      }
      apply_base_encoding(font, base_encoding);
      int code = 0;
      for (const Object& item : differences) {
        const Object v = doc_.resolve(item);
        if (v.is_number()) {
          code = static_cast<int>(v.as_int());
        } else if (v.is_name()) {
          if (code >= 0 && code < 256) font.simple[code] = glyph_to_unicode(v.name());
          ++code;
        }
      }

      const Object first = doc_.get(d, "FirstChar");
      const Object widths = doc_.get(d, "Widths");
      if (first.is_number() && widths.is_array()) {
        auto c = static_cast<std::uint32_t>(first.as_int());
        for (const Object& w : widths.array()) {
          const Object wv = doc_.resolve(w);
          if (wv.is_number()) font.widths[c] = wv.as_number() / 1000.0;
          ++c;
        }
        const Object desc = doc_.get(d, "FontDescriptor");
        if (desc.is_dict()) {
          const Object mw = doc_.get(desc.dict(), "MissingWidth");
          if (mw.is_number()) font.default_width = mw.as_number() / 1000.0;
        }
      } else if (base_name.find("Courier") != std::string::npos) {
        font.default_width = 0.6;
      } else {
        for (int i = 0; i < 95; ++i) font.widths[static_cast<std::uint32_t>(0x20 + i)] = kHelveticaWidths[i] / 1000.0;
        font.default_width = 0.556;
      }
      if (subtype.is_name("Type3")) {
        const Object fm = doc_.get(d, "FontMatrix");
        if (fm.is_array() && !fm.array().empty()) {
          font.width_scale = doc_.resolve(fm.array()[0]).as_number() * 1000.0;
        }
      }
    }

    const Object tu = doc_.get(d, "ToUnicode");
    if (tu.is_stream()) {
      try {
        auto cm = parse_cmap(doc_.decode(tu.stream()).data);
        font.to_unicode = std::move(cm.map);
        if (cm.code_bytes > 0 && subtype.is_name("Type0")) font.code_bytes = cm.code_bytes;
      } catch (const PdfError&) {
      }
    }
    return font;
  }

  void load_cid_widths(Font& font, const Array& w) {
    std::size_t i = 0;
    while (i < w.size()) {
      const Object a = doc_.resolve(w[i]);
      if (!a.is_number() || i + 1 >= w.size()) break;
      const Object b = doc_.resolve(w[i + 1]);
      if (b.is_array()) {
        auto c = static_cast<std::uint32_t>(a.as_int());
        for (const Object& wv : b.array()) {
          const Object v = doc_.resolve(wv);
          if (v.is_number()) font.widths[c] = v.as_number() / 1000.0;
          ++c;
        }
        i += 2;
      } else if (i + 2 < w.size()) {
        const Object width = doc_.resolve(w[i + 2]);
        const auto lo = static_cast<std::uint32_t>(a.as_int());
        const auto hi = static_cast<std::uint32_t>(b.as_int());
        if (width.is_number() && hi >= lo && hi - lo < 0x10000) {
          for (auto c = lo; c <= hi; ++c) font.widths[c] = width.as_number() / 1000.0;
        }
        i += 3;
      } else {
        break;
      }
    }
  }

  const Document& doc_;
  std::map<const void*, Font> cache_;
  Font scratch_;
};

struct Matrix {
  double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;

  // this × m (apply this first, then m)
  Matrix then(const Matrix& m) const {
    return {a * m.a + b * m.c,       a * m.b + b * m.d,       c * m.a + d * m.c,
            c * m.b + d * m.d,       e * m.a + f * m.c + m.e, e * m.b + f * m.d + m.f};
  }
  static Matrix translate(double tx, double ty) { return {1, 0, 0, 1, tx, ty}; }
  double scale() const { return std::sqrt(std::abs(a * d - b * c)); }
};

Matrix matrix_from(const std::vector<Object>& ops, std::size_t first) {
  Matrix m;
  if (ops.size() < first + 6) return m;
  double v[6];
  for (int i = 0; i < 6; ++i) {
    if (!ops[first + i].is_number()) return m;
    v[i] = ops[first + i].as_number();
  }
  return {v[0], v[1], v[2], v[3], v[4], v[5]};
}

class TextExtractor {
 public:
  explicit TextExtractor(const Document& doc) : doc_(doc), fonts_(doc) {}

  void run(std::string_view content, const Dict& resources, const Matrix& base, int depth) {
    if (depth > 8) return;
    struct GState {
      Matrix ctm;
    };
    std::vector<GState> stack;
    GState gs{base};

    for_each_operation(content, [&](const Operation& op) {
      const auto& o = op.operands;
      const std::string& k = op.op;
      auto num = [&](std::size_t i) { return i < o.size() && o[i].is_number() ? o[i].as_number() : 0.0; };

      if (k == "q") {
        stack.push_back(gs);
      } else if (k == "Q") {
        if (!stack.empty()) {
          gs = stack.back();
          stack.pop_back();
        }
      } else if (k == "cm") {
        gs.ctm = matrix_from(o, 0).then(gs.ctm);
      } else if (k == "BT") {
        tm_ = tlm_ = Matrix{};
      } else if (k == "Tf") {
        if (o.size() >= 2 && o[0].is_name()) {
          const Object fonts = doc_.get(resources, "Font");
          font_ = nullptr;
          if (fonts.is_dict()) {
            if (const Object* f = find(fonts.dict(), o[0].name())) font_ = &fonts_.get(*f);
          }
          font_size_ = num(1);
        }
      } else if (k == "Tc") {
        char_spacing_ = num(0);
      } else if (k == "Tw") {
        word_spacing_ = num(0);
      } else if (k == "Tz") {
        h_scale_ = num(0) / 100.0;
      } else if (k == "TL") {
        leading_ = num(0);
      } else if (k == "Ts") {
        rise_ = num(0);
      } else if (k == "Td") {
        tlm_ = Matrix::translate(num(0), num(1)).then(tlm_);
        tm_ = tlm_;
      } else if (k == "TD") {
        leading_ = -num(1);
        tlm_ = Matrix::translate(num(0), num(1)).then(tlm_);
        tm_ = tlm_;
      } else if (k == "Tm") {
        tlm_ = tm_ = matrix_from(o, 0);
      } else if (k == "T*") {
        next_line();
      } else if (k == "Tj") {
        if (!o.empty() && o[0].is_string()) show(o[0].string(), gs.ctm);
      } else if (k == "'") {
        next_line();
        if (!o.empty() && o[0].is_string()) show(o[0].string(), gs.ctm);
      } else if (k == "\"") {
        word_spacing_ = num(0);
        char_spacing_ = num(1);
        next_line();
        if (o.size() >= 3 && o[2].is_string()) show(o[2].string(), gs.ctm);
      } else if (k == "TJ") {
        if (!o.empty() && o[0].is_array()) {
          for (const Object& item : o[0].array()) {
            if (item.is_string()) {
              show(item.string(), gs.ctm);
            } else if (item.is_number()) {
              const double tx = -item.as_number() / 1000.0 * font_size_ * h_scale_;
              tm_ = Matrix::translate(tx, 0).then(tm_);
            }
          }
        }
      } else if (k == "Do") {
        if (o.empty() || !o[0].is_name()) return;
        const Object xobjects = doc_.get(resources, "XObject");
        if (!xobjects.is_dict()) return;
        const Object* ref = find(xobjects.dict(), o[0].name());
        if (!ref) return;
        const Object xo = doc_.resolve(*ref);
        if (!xo.is_stream()) return;
        const Object subtype = doc_.get(xo.dict(), "Subtype");
        if (!subtype.is_name("Form")) return;
        Matrix form_matrix;
        const Object fm = doc_.get(xo.dict(), "Matrix");
        if (fm.is_array()) {
          std::vector<Object> v(fm.array().begin(), fm.array().end());
          form_matrix = matrix_from(v, 0);
        }
        const Object form_res = doc_.get(xo.dict(), "Resources");
        const Dict& res = form_res.is_dict() ? form_res.dict() : resources;
        const Matrix saved_tm = tm_, saved_tlm = tlm_;
        run(doc_.decode(xo.stream()).data, res, form_matrix.then(gs.ctm), depth + 1);
        tm_ = saved_tm;
        tlm_ = saved_tlm;
      }
    });
  }

  std::string finish() {
    // Strip trailing blanks on every line.
    std::u32string cleaned;
    std::size_t line_start = 0;
    for (char32_t c : out_) {
      if (c == U'\n') {
        while (cleaned.size() > line_start && cleaned.back() == U' ') cleaned.pop_back();
        cleaned.push_back(c);
        line_start = cleaned.size();
      } else {
        cleaned.push_back(c);
      }
    }
    while (!cleaned.empty() && (cleaned.back() == U' ' || cleaned.back() == U'\n')) cleaned.pop_back();
    return unicode::encode(cleaned);
  }

 private:
  void next_line() {
    tlm_ = Matrix::translate(0, -leading_).then(tlm_);
    tm_ = tlm_;
  }

  void show(const std::string& bytes, const Matrix& ctm) {
    if (!font_) return;
    const int n = font_->code_bytes;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= bytes.size(); i += static_cast<std::size_t>(n)) {
      const std::uint32_t code = code_of(std::string_view(bytes).substr(i, static_cast<std::size_t>(n)));
      const Matrix trm = Matrix{font_size_ * h_scale_, 0, 0, font_size_, 0, rise_}.then(tm_).then(ctm);
      const double size = std::max(trm.scale(), 0.1);
      const double x = trm.e, y = trm.f;
      std::u32string text = font_->text(code);

      if (has_prev_) {
        const double ref_size = std::max(size, prev_size_);
        // Rotated text is rare in protocols; compare along device axes.
        if (std::abs(y - prev_y_) > 0.5 * ref_size) {
          if (!out_.empty() && out_.back() != U'\n') out_.push_back(U'\n');
        } else {
          const double gap = x - prev_x_;
          if ((gap > 0.15 * ref_size || gap < -2.0 * ref_size) && !out_.empty() &&
              out_.back() != U' ' && out_.back() != U'\n' && !(text.size() == 1 && text[0] == U' ')) {
            out_.push_back(U' ');
          }
        }
      }
      for (char32_t c : text) {
        if (c == 0x00A0) c = U' ';
        if (c == U' ' && (out_.empty() || out_.back() == U' ' || out_.back() == U'\n')) continue;
        if (c < 0x20 && c != U'\n') continue;
        out_.push_back(c);
      }

      double advance = font_->width(code) * font_size_ + char_spacing_;
      if (n == 1 && code == 32) advance += word_spacing_;
      tm_ = Matrix::translate(advance * h_scale_, 0).then(tm_);
      const Matrix end = Matrix{font_size_ * h_scale_, 0, 0, font_size_, 0, rise_}.then(tm_).then(ctm);
      prev_x_ = end.e;
      prev_y_ = end.f;
      prev_size_ = size;
      has_prev_ = true;
    }
  }

  const Document& doc_;
  FontCache fonts_;
  const Font* font_ = nullptr;
  double font_size_ = 0, char_spacing_ = 0, word_spacing_ = 0, h_scale_ = 1, leading_ = 0, rise_ = 0;
  Matrix tm_, tlm_;
  bool has_prev_ = false;
  double prev_x_ = 0, prev_y_ = 0, prev_size_ = 0;
  std::u32string out_;
};

}  // namespace

std::string extract_page_text(const Document& doc, int page) {
  const Dict& p = doc.page(page);
  const Object resources = doc.get(p, "Resources");
  static const Dict kEmpty;
  TextExtractor extractor(doc);
  extractor.run(doc.page_contents(page), resources.is_dict() ? resources.dict() : kEmpty, Matrix{}, 0);
  return extractor.finish();
}

}  // namespace parlagest::pdf
