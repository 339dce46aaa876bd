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

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "parlagest/error.hpp"
#include "parlagest/pdf.hpp"

namespace parlagest::pdf {
namespace {

bool is_white(char c) {
  return c == ' ' || c == '\n' || c == '\r' || c == '\t' || c == '\f' || c == '\0';
}

bool is_boundary(char c) {
  return is_white(c) || c == '(' || c == ')' || c == '<' || c == '>' || c == '[' || c == ']' ||
         c == '{' || c == '}' || c == '/' || c == '%';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string inflate_bytes(std::string_view in) {
  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) throw PdfError("zlib init failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  std::string out;
  char buf[65536];
  int rc = Z_OK;
  do {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof(buf);
    rc = inflate(&zs, Z_NO_FLUSH);
    out.append(buf, sizeof(buf) - zs.avail_out);
    if (rc == Z_BUF_ERROR && zs.avail_in == 0) break;  // truncated stream
  } while (rc == Z_OK);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END && rc != Z_BUF_ERROR && out.empty()) {
    throw PdfError("corrupt FlateDecode stream");
  }
  return out;
}

std::string lzw_decode(std::string_view in, int early_change) {
  std::vector<std::string> table;
  auto reset = [&] {
    table.clear();
    for (int i = 0; i < 256; ++i) table.emplace_back(1, static_cast<char>(i));
    table.emplace_back();  // 256 clear
    table.emplace_back();  // 257 EOD
  };
  reset();
  std::string out;
  int code_len = 9;
  std::uint32_t bitbuf = 0;
  int bits = 0;
  std::size_t pos = 0;
  std::string prev;
  bool have_prev = false;
  for (;;) {
    while (bits < code_len && pos < in.size()) {
      bitbuf = (bitbuf << 8) | static_cast<unsigned char>(in[pos++]);
      bits += 8;
    }
    if (bits < code_len) break;
    const int code = static_cast<int>((bitbuf >> (bits - code_len)) & ((1u << code_len) - 1));
    bits -= code_len;
    if (code == 256) {
      reset();
      code_len = 9;
      have_prev = false;
      continue;
    }
    if (code == 257) break;
    std::string entry;
    if (code < static_cast<int>(table.size())) {
      entry = table[code];
    } else if (have_prev && code == static_cast<int>(table.size())) {
      entry = prev + prev[0];
    } else {
      throw PdfError("corrupt LZW stream");
    }
    out += entry;
    if (have_prev) table.push_back(prev + entry[0]);
    prev = entry;
    have_prev = true;
    const auto next_size = table.size() + static_cast<std::size_t>(early_change);
    if (next_size >= 4096) {
      code_len = 12;
    } else if (next_size >= 2048) {
      code_len = 12;
    } else if (next_size >= 1024) {
      code_len = 11;
    } else if (next_size >= 512) {
      code_len = 10;
    }
  }
  return out;
}

std::string ascii_hex_decode(std::string_view in) {
  std::string out;
  int hi = -1;
  for (char c : in) {
    if (c == '>') break;
    int v = -1;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    if (v < 0) continue;
    if (hi < 0) {
      hi = v;
    } else {
      out.push_back(static_cast<char>(hi * 16 + v));
      hi = -1;
    }
  }
  if (hi >= 0) out.push_back(static_cast<char>(hi * 16));
  return out;
}

std::string ascii85_decode(std::string_view in) {
  std::string out;
  std::uint32_t tuple = 0;
  int count = 0;
  std::size_t i = 0;
  if (in.substr(0, 2) == "<~") i = 2;
  for (; i < in.size(); ++i) {
    const char c = in[i];
    if (c == '~') break;
    if (is_white(c)) continue;
    if (c == 'z' && count == 0) {
      out.append(4, '\0');
      continue;
    }
    if (c < '!' || c > 'u') throw PdfError("corrupt ASCII85 stream");
    tuple = tuple * 85 + static_cast<std::uint32_t>(c - '!');
    if (++count == 5) {
      for (int k = 3; k >= 0; --k) out.push_back(static_cast<char>((tuple >> (8 * k)) & 0xFF));
      tuple = 0;
      count = 0;
    }
  }
  if (count > 1) {
    for (int k = count; k < 5; ++k) tuple = tuple * 85 + 84;
    for (int k = 0; k < count - 1; ++k) out.push_back(static_cast<char>((tuple >> (8 * (3 - k))) & 0xFF));
  }
  return out;
}

std::string run_length_decode(std::string_view in) {
  std::string out;
  std::size_t i = 0;
  while (i < in.size()) {
    const int len = static_cast<unsigned char>(in[i++]);
    if (len == 128) break;
    if (len < 128) {
      const std::size_t n = std::min<std::size_t>(len + 1, in.size() - i);
      out.append(in.substr(i, n));
      i += n;
    } else if (i < in.size()) {
      out.append(static_cast<std::size_t>(257 - len), in[i++]);
    }
  }
  return out;
}

std::string apply_predictor(std::string data, const Dict* params) {
  if (!params) return data;
  auto num = [&](std::string_view key, std::int64_t dflt) {
    const Object* o = find(*params, key);
    return o && o->is_number() ? o->as_int() : dflt;
  };
  const auto predictor = num("Predictor", 1);
  if (predictor <= 1) return data;
  const auto colors = num("Colors", 1);
  const auto bpc = num("BitsPerComponent", 8);
  const auto columns = num("Columns", 1);
  const std::size_t bpp = static_cast<std::size_t>(std::max<std::int64_t>(1, (colors * bpc + 7) / 8));
  const std::size_t row_len = static_cast<std::size_t>((columns * colors * bpc + 7) / 8);
  if (row_len == 0) return data;

  if (predictor == 2) {
    if (bpc != 8) return data;
    for (std::size_t row = 0; row + row_len <= data.size(); row += row_len) {
      for (std::size_t i = bpp; i < row_len; ++i) {
        data[row + i] = static_cast<char>(data[row + i] + data[row + i - bpp]);
      }
    }
    return data;
  }

  std::string out;
  std::vector<unsigned char> prev(row_len, 0);
  std::vector<unsigned char> cur(row_len, 0);
  std::size_t pos = 0;
  while (pos < data.size()) {
    const int type = static_cast<unsigned char>(data[pos++]);
    const std::size_t n = std::min(row_len, data.size() - pos);
    std::fill(cur.begin(), cur.end(), 0);
    for (std::size_t i = 0; i < n; ++i) cur[i] = static_cast<unsigned char>(data[pos + i]);
    pos += n;
    for (std::size_t i = 0; i < row_len; ++i) {
      const int left = i >= bpp ? cur[i - bpp] : 0;
      const int up = prev[i];
      const int up_left = i >= bpp ? prev[i - bpp] : 0;
      int v = cur[i];
      switch (type) {
        case 1: v += left; break;
        case 2: v += up; break;
        case 3: v += (left + up) / 2; break;
        case 4: {
          const int p = left + up - up_left;
          const int pa = std::abs(p - left), pb = std::abs(p - up), pc = std::abs(p - up_left);
          v += (pa <= pb && pa <= pc) ? left : (pb <= pc ? up : up_left);
          break;
        }
        default: break;
      }
      cur[i] = static_cast<unsigned char>(v & 0xFF);
    }
    out.append(reinterpret_cast<const char*>(cur.data()), n);
    prev = cur;
  }
  return out;
}

struct Definition {
  std::size_t position = 0;
  Object object;
};

}  // namespace

struct Document::Impl {
  std::string bytes;
  std::unordered_map<int, Definition> objects;
  Dict trailer;
  std::vector<Dict> pages;

  Object resolve(const Object& obj, int depth = 0) const {
    if (!obj.is_ref()) return obj;
    if (depth > 32) return Object();
    auto it = objects.find(obj.ref().num);
    if (it == objects.end()) return Object();
    return resolve(it->second.object, depth + 1);
  }

  void define(int num, std::size_t position, Object obj) {
    auto it = objects.find(num);
    if (it != objects.end() && it->second.position > position) return;
    objects[num] = Definition{position, std::move(obj)};
  }

  void scan();
  void expand_object_streams();
  void collect_pages();
  Document::Decoded decode(const Stream& s) const;
};

namespace {

// Reads "<num> <gen>" backwards from the position of "obj".
bool object_header_before(std::string_view data, std::size_t obj_pos, int& num, std::size_t& start) {
  std::size_t i = obj_pos;
  auto skip_ws_back = [&] {
    std::size_t n = 0;
    while (i > 0 && is_white(data[i - 1])) {
      --i;
      ++n;
    }
    return n;
  };
  auto digits_back = [&] {
    const std::size_t end = i;
    while (i > 0 && is_digit(data[i - 1])) --i;
    return end - i;
  };
  skip_ws_back();
  if (digits_back() == 0) return false;
  if (skip_ws_back() == 0) return false;
  const std::size_t num_end = i;
  if (digits_back() == 0) return false;
  if (i > 0 && !is_boundary(data[i - 1])) return false;
  num = std::atoi(std::string(data.substr(i, num_end - i)).c_str());
  start = i;
  return true;
}

}  // namespace

void Document::Impl::scan() {
  std::string_view data(bytes);
  struct PendingStream {
    int num;
    std::size_t position;
    Dict dict;
    std::size_t data_start;
    std::size_t data_end;
    Ref length_ref;
  };
  std::vector<PendingStream> pending;

  std::size_t pos = 0;
  while (true) {
    const std::size_t hit = data.find("obj", pos);
    if (hit == std::string_view::npos) break;
    pos = hit + 3;
    if (hit + 3 < data.size() && !is_boundary(data[hit + 3])) continue;
    int num = 0;
    std::size_t start = 0;
    if (!object_header_before(data, hit, num, start)) continue;

    Lexer lexer(data, hit + 3);
    Object obj;
    try {
      obj = parse_object(lexer);
    } catch (const PdfError&) {
      continue;
    }
    std::size_t after = lexer.pos();
    Lexer peek(data, after);
    auto tok = peek.next();
    if (tok.kind == Lexer::Kind::keyword && tok.text == "stream" && obj.is_dict()) {
      std::size_t ds = peek.pos();
      if (ds < data.size() && data[ds] == '\r') ++ds;
      if (ds < data.size() && data[ds] == '\n') ++ds;
      const Dict& d = obj.dict();
      const Object* len = find(d, "Length");
      std::size_t de = std::string_view::npos;
      if (len && len->is_int() && len->as_int() >= 0 &&
          ds + static_cast<std::size_t>(len->as_int()) <= data.size()) {
        const std::size_t candidate = ds + static_cast<std::size_t>(len->as_int());
        Lexer check(data, candidate);
        auto t = check.next();
        if (t.kind == Lexer::Kind::keyword && t.text == "endstream") de = candidate;
      }
      Ref length_ref{-1, 0};
      if (de == std::string_view::npos) {
        const std::size_t es = data.find("endstream", ds);
        if (es == std::string_view::npos) continue;
        de = es;
        if (de > ds && data[de - 1] == '\n') --de;
        if (de > ds && data[de - 1] == '\r') --de;
        if (len && len->is_ref()) length_ref = len->ref();
      }
      pending.push_back({num, start, d, ds, de, length_ref});
      const std::size_t es = data.find("endstream", de);
      pos = es == std::string_view::npos ? data.size() : es + 9;
      continue;
    }
    define(num, start, std::move(obj));
    pos = after;
  }

  for (auto& p : pending) {
    if (p.length_ref.num >= 0) {
      const Object len = resolve(Object(p.length_ref));
      if (len.is_int() && len.as_int() >= 0 &&
          p.data_start + static_cast<std::size_t>(len.as_int()) <= data.size()) {
        p.data_end = p.data_start + static_cast<std::size_t>(len.as_int());
      }
    }
    Stream s{std::move(p.dict), std::string(data.substr(p.data_start, p.data_end - p.data_start))};
    define(p.num, p.position, Object::stream(std::move(s)));
  }

  // Trailer: last classic trailer with a Root, else the newest XRef stream.
  for (std::size_t t = data.find("trailer"); t != std::string_view::npos;
       t = data.find("trailer", t + 7)) {
    Lexer lexer(data, t + 7);
    try {
      Object d = parse_object(lexer);
      if (d.is_dict() && find(d.dict(), "Root")) trailer = d.dict();
    } catch (const PdfError&) {
    }
  }
  if (trailer.empty()) {
    std::size_t best = 0;
    for (const auto& [num, def] : objects) {
      if (def.object.is_stream() && def.object.dict().count("Root") &&
          (trailer.empty() || def.position > best)) {
        const Object* type = find(def.object.dict(), "Type");
        if (type && type->is_name("XRef")) {
          trailer = def.object.dict();
          best = def.position;
        }
      }
    }
  }
}

void Document::Impl::expand_object_streams() {
  std::vector<std::pair<std::size_t, std::shared_ptr<const Stream>>> containers;
  for (const auto& [num, def] : objects) {
    if (!def.object.is_stream()) continue;
    const Object* type = find(def.object.dict(), "Type");
    if (type && type->is_name("ObjStm")) {
      containers.emplace_back(def.position,
                              std::get<std::shared_ptr<const Stream>>(def.object.value()));
    }
  }
  for (const auto& [position, stream] : containers) {
    std::string decoded;
    try {
      decoded = decode(*stream).data;
    } catch (const PdfError&) {
      continue;
    }
    const Object* n_obj = find(stream->dict, "N");
    const Object* first_obj = find(stream->dict, "First");
    if (!n_obj || !first_obj || !n_obj->is_int() || !first_obj->is_int()) continue;
    const auto n = n_obj->as_int();
    const auto first = static_cast<std::size_t>(first_obj->as_int());
    Lexer header(decoded);
    std::vector<std::pair<int, std::size_t>> members;
    for (std::int64_t i = 0; i < n; ++i) {
      auto a = header.next();
      auto b = header.next();
      if (a.kind != Lexer::Kind::integer || b.kind != Lexer::Kind::integer) break;
      members.emplace_back(static_cast<int>(a.integer), static_cast<std::size_t>(b.integer));
    }
    for (const auto& [num, offset] : members) {
      if (first + offset >= decoded.size()) continue;
      Lexer lexer(decoded, first + offset);
      try {
        define(num, position, parse_object(lexer));
      } catch (const PdfError&) {
      }
    }
  }
}

void Document::Impl::collect_pages() {
  Object root = resolve(trailer.count("Root") ? trailer.at("Root") : Object());
  if (!root.is_dict()) {
    for (const auto& [num, def] : objects) {
      if (def.object.is_dict()) {
        const Object* type = find(def.object.dict(), "Type");
        if (type && type->is_name("Catalog")) {
          root = def.object;
          break;
        }
      }
    }
  }
  if (!root.is_dict()) throw PdfError("no document catalog");
  const Object* pages_ref = find(root.dict(), "Pages");
  if (!pages_ref) throw PdfError("catalog has no page tree");

  std::set<int> visited;
  std::function<void(const Object&, const Dict&, int)> walk = [&](const Object& node_ref,
                                                                   const Dict& inherited,
                                                                   int depth) {
    if (depth > 64) throw PdfError("page tree too deep");
    if (node_ref.is_ref()) {
      if (!visited.insert(node_ref.ref().num).second) return;
    }
    const Object node = resolve(node_ref);
    if (!node.is_dict()) return;
    const Dict& d = node.dict();
    Dict inh = inherited;
    for (const char* key : {"Resources", "MediaBox", "CropBox", "Rotate"}) {
      if (const Object* v = find(d, key)) inh[key] = *v;
    }
    const Object* type = find(d, "Type");
    const Object kids = resolve(find(d, "Kids") ? d.at("Kids") : Object());
    if ((type && type->is_name("Page")) || !kids.is_array()) {
      Dict page = d;
      for (const auto& [k, v] : inh) page[k] = v;
      pages.push_back(std::move(page));
      return;
    }
    for (const Object& kid : kids.array()) walk(kid, inh, depth + 1);
  };
  walk(*pages_ref, Dict{}, 0);
  if (pages.empty()) throw PdfError("document has no pages");
}

Document::Decoded Document::Impl::decode(const Stream& s) const {
  Decoded out;
  out.data = s.data;
  const Object filter = resolve(find(s.dict, "Filter") ? s.dict.at("Filter") : Object());
  const Object parms = resolve(find(s.dict, "DecodeParms") ? s.dict.at("DecodeParms") : Object());
  std::vector<std::string> filters;
  std::vector<Object> params;
  if (filter.is_name()) {
    filters.push_back(filter.name());
    params.push_back(parms);
  } else if (filter.is_array()) {
    for (std::size_t i = 0; i < filter.array().size(); ++i) {
      const Object f = resolve(filter.array()[i]);
      if (f.is_name()) filters.push_back(f.name());
      params.push_back(parms.is_array() && i < parms.array().size() ? resolve(parms.array()[i])
                                                                    : Object());
    }
  }
  for (std::size_t i = 0; i < filters.size(); ++i) {
    const std::string& f = filters[i];
    const Dict* p = params[i].is_dict() ? &params[i].dict() : nullptr;
    if (f == "FlateDecode" || f == "Fl") {
      out.data = apply_predictor(inflate_bytes(out.data), p);
    } else if (f == "LZWDecode" || f == "LZW") {
      int early = 1;
      if (p) {
        if (const Object* e = find(*p, "EarlyChange"); e && e->is_int()) early = static_cast<int>(e->as_int());
      }
      out.data = apply_predictor(lzw_decode(out.data, early), p);
    } else if (f == "ASCIIHexDecode" || f == "AHx") {
      out.data = ascii_hex_decode(out.data);
    } else if (f == "ASCII85Decode" || f == "A85") {
      out.data = ascii85_decode(out.data);
    } else if (f == "RunLengthDecode" || f == "RL") {
      out.data = run_length_decode(out.data);
    } else if (f == "DCTDecode" || f == "DCT" || f == "JPXDecode" || f == "CCITTFaxDecode" ||
               f == "CCF" || f == "JBIG2Decode") {
      out.image_filter = f;
      break;
    } else if (f == "Crypt") {
      continue;
    } else {
      throw PdfError("unsupported stream filter " + f);
    }
  }
  return out;
}

Document Document::from_bytes(std::string bytes) {
  auto impl = std::make_shared<Impl>();
  impl->bytes = std::move(bytes);
  const auto header = std::string_view(impl->bytes).substr(0, 1024).find("%PDF-");
  if (header == std::string_view::npos) throw PdfError("missing %PDF- header");
  impl->scan();
  impl->expand_object_streams();
  if (impl->trailer.count("Encrypt")) throw PdfError("encrypted PDF files are not supported");
  impl->collect_pages();
  return Document(std::move(impl));
}

Document Document::open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PdfError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_bytes(std::move(buf).str());
}

int Document::page_count() const { return static_cast<int>(impl_->pages.size()); }

const Dict& Document::page(int index) const {
  if (index < 0 || index >= page_count()) throw PdfError("page index out of range");
  return impl_->pages[static_cast<std::size_t>(index)];
}

Object Document::resolve(const Object& obj) const { return impl_->resolve(obj); }

Object Document::get(const Dict& d, std::string_view key) const {
  const Object* o = find(d, key);
  return o ? impl_->resolve(*o) : Object();
}

Document::Decoded Document::decode(const Stream& stream) const { return impl_->decode(stream); }

std::string Document::page_contents(int index) const {
  const Object contents = get(page(index), "Contents");
  std::string out;
  auto append = [&](const Object& o) {
    const Object s = resolve(o);
    if (!s.is_stream()) return;
    out += decode(s.stream()).data;
    out.push_back('\n');
  };
  if (contents.is_array()) {
    for (const Object& part : contents.array()) append(part);
  } else {
    append(contents);
  }
  return out;
}

std::pair<double, double> page_size_pt(const Document& doc, int page) {
  const Dict& p = doc.page(page);
  Object box = doc.get(p, "CropBox");
  if (!box.is_array() || box.array().size() != 4) box = doc.get(p, "MediaBox");
  if (!box.is_array() || box.array().size() != 4) return {612.0, 792.0};
  const auto& a = box.array();
  const double w = std::abs(doc.resolve(a[2]).as_number() - doc.resolve(a[0]).as_number());
  const double h = std::abs(doc.resolve(a[3]).as_number() - doc.resolve(a[1]).as_number());
  return {w, h};
}

}  // namespace parlagest::pdf
