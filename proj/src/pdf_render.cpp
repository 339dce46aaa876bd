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

#include <algorithm>
#include <array>
#include <cmath>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "parlagest/error.hpp"
#include "parlagest/pdf.hpp"

namespace parlagest::pdf {
namespace {

struct Affine {
  double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;
  Affine then(const Affine& m) const {
    return {a * m.a + b * m.c,       a * m.b + b * m.d,       c * m.a + d * m.c,
            c * m.b + d * m.d,       e * m.a + f * m.c + m.e, e * m.b + f * m.d + m.f};
  }
  cv::Point2d apply(double x, double y) const { return {a * x + c * y + e, b * x + d * y + f}; }
};

Affine affine_from(const std::vector<Object>& o) {
  if (o.size() < 6) return {};
  for (std::size_t i = 0; i < 6; ++i) {
    if (!o[i].is_number()) return {};
  }
  return {o[0].as_number(), o[1].as_number(), o[2].as_number(),
          o[3].as_number(), o[4].as_number(), o[5].as_number()};
}

std::array<double, 4> page_box(const Document& doc, int page) {
  const Dict& p = doc.page(page);
  for (const char* key : {"CropBox", "MediaBox"}) {
    const Object box = doc.get(p, key);
    if (box.is_array() && box.array().size() == 4) {
      std::array<double, 4> v{};
      for (int i = 0; i < 4; ++i) v[i] = doc.resolve(box.array()[i]).as_number();
      return {std::min(v[0], v[2]), std::min(v[1], v[3]), std::max(v[0], v[2]), std::max(v[1], v[3])};
    }
  }
  return {0, 0, 612, 792};
}

// Sample unpacking to 8 bits per component.
std::vector<std::uint8_t> unpack_samples(std::string_view data, int width, int height, int comps, int bpc) {
  const std::size_t row_bytes = static_cast<std::size_t>((width * comps * bpc + 7) / 8);
  const std::size_t n = static_cast<std::size_t>(width) * comps;
  std::vector<std::uint8_t> out(n * static_cast<std::size_t>(height), 0);
  if (data.size() < row_bytes * static_cast<std::size_t>(height)) {
    throw PdfError("image data shorter than declared size");
  }
  const int max_v = (1 << std::min(bpc, 8)) - 1;
  for (int y = 0; y < height; ++y) {
    const auto* row = reinterpret_cast<const unsigned char*>(data.data()) + row_bytes * static_cast<std::size_t>(y);
    auto* dst = out.data() + n * static_cast<std::size_t>(y);
    if (bpc == 8) {
      std::copy(row, row + n, dst);
    } else if (bpc == 16) {
      for (std::size_t i = 0; i < n; ++i) dst[i] = row[2 * i];
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t bit = i * static_cast<std::size_t>(bpc);
        const int shift = 8 - bpc - static_cast<int>(bit % 8);
        const int v = (row[bit / 8] >> shift) & max_v;
        dst[i] = static_cast<std::uint8_t>(v * 255 / max_v);
      }
    }
  }
  return out;
}

struct ColorSpace {
  enum class Kind { gray, rgb, cmyk, indexed, separation } kind = Kind::gray;
  int components = 1;
  std::string lookup;  // indexed palette, base colors
  int base_components = 3;
  int hival = 0;
};

ColorSpace resolve_color_space(const Document& doc, const Object& cs_in, const Dict* resources) {
  Object cs = doc.resolve(cs_in);
  if (cs.is_name() && resources) {
    const Object named = doc.get(*resources, "ColorSpace");
    if (named.is_dict()) {
      if (const Object* def = find(named.dict(), cs.name())) cs = doc.resolve(*def);
    }
  }
  ColorSpace out;
  auto by_name = [&](const std::string& n) {
    if (n == "DeviceRGB" || n == "CalRGB" || n == "RGB") {
      out.kind = ColorSpace::Kind::rgb;
      out.components = 3;
    } else if (n == "DeviceCMYK" || n == "CMYK") {
      out.kind = ColorSpace::Kind::cmyk;
      out.components = 4;
    } else {
      out.kind = ColorSpace::Kind::gray;
      out.components = 1;
    }
  };
  if (cs.is_name()) {
    by_name(cs.name());
    return out;
  }
  if (cs.is_array() && !cs.array().empty()) {
    const auto& a = cs.array();
    const Object family = doc.resolve(a[0]);
    const std::string fam = family.is_name() ? family.name() : "";
    if (fam == "ICCBased" && a.size() > 1) {
      const Object icc = doc.resolve(a[1]);
      const Object n = icc.is_stream() ? doc.get(icc.dict(), "N") : Object();
      const int comps = n.is_number() ? static_cast<int>(n.as_int()) : 3;
      by_name(comps == 4 ? "DeviceCMYK" : comps == 3 ? "DeviceRGB" : "DeviceGray");
    } else if ((fam == "Indexed" || fam == "I") && a.size() >= 4) {
      const ColorSpace base = resolve_color_space(doc, a[1], resources);
      out.kind = ColorSpace::Kind::indexed;
      out.components = 1;
      out.base_components = base.components;
      out.hival = static_cast<int>(doc.resolve(a[2]).as_int());
      const Object lookup = doc.resolve(a[3]);
      if (lookup.is_string()) out.lookup = lookup.string();
      else if (lookup.is_stream()) out.lookup = doc.decode(lookup.stream()).data;
      if (base.kind == ColorSpace::Kind::gray) out.base_components = 1;
    } else if (fam == "Separation" || fam == "DeviceN") {
      out.kind = ColorSpace::Kind::separation;
      out.components = 1;
      if (fam == "DeviceN" && a.size() > 1) {
        const Object names = doc.resolve(a[1]);
        if (names.is_array()) out.components = static_cast<int>(names.array().size());
      }
    } else {
      by_name(fam);
    }
  }
  return out;
}

struct DecodedImage {
  cv::Mat pixels;     // CV_8UC1 or CV_8UC3 (BGR); empty for stencil masks
  cv::Mat stencil;    // CV_8UC1, 255 where paint applies
};

DecodedImage decode_image(const Document& doc, const Dict& dict, std::string encoded,
                          const std::string& image_filter, const Dict* resources) {
  auto entry = [&](std::string_view full, std::string_view abbrev) {
    Object o = doc.get(dict, full);
    if (o.is_null()) o = doc.get(dict, abbrev);
    return o;
  };
  const Object w_obj = entry("Width", "W");
  const Object h_obj = entry("Height", "H");
  if (!w_obj.is_number() || !h_obj.is_number()) throw PdfError("image without dimensions");
  const int width = static_cast<int>(w_obj.as_int());
  const int height = static_cast<int>(h_obj.as_int());
  if (width <= 0 || height <= 0 || static_cast<double>(width) * height > 4e8) {
    throw PdfError("image dimensions out of range");
  }
  const Object mask_flag = entry("ImageMask", "IM");
  const bool is_mask = mask_flag.is_bool() && mask_flag.as_bool();
  const Object decode_arr = entry("Decode", "D");
  const bool inverted = decode_arr.is_array() && decode_arr.array().size() >= 2 &&
                        doc.resolve(decode_arr.array()[0]).as_number() > doc.resolve(decode_arr.array()[1]).as_number();

  DecodedImage out;
  if (!image_filter.empty()) {
    if (image_filter != "DCTDecode" && image_filter != "DCT" && image_filter != "JPXDecode") {
      throw PdfError("unsupported image encoding " + image_filter);
    }
    std::vector<uchar> buf(encoded.begin(), encoded.end());
    cv::Mat img = cv::imdecode(buf, cv::IMREAD_ANYCOLOR);
    if (img.empty()) throw PdfError("cannot decode " + image_filter + " image");
    if (img.channels() == 4) cv::cvtColor(img, img, cv::COLOR_BGRA2BGR);
    if (img.depth() != CV_8U) img.convertTo(img, CV_8U, 1.0 / 256.0);
    if (inverted) cv::bitwise_not(img, img);
    out.pixels = img;
    return out;
  }

  if (is_mask) {
    const auto samples = unpack_samples(encoded, width, height, 1, 1);
    cv::Mat stencil(height, width, CV_8UC1);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const bool bit_set = samples[static_cast<std::size_t>(y) * width + x] != 0;
        // Default decode [0 1]: sample 0 paints.
        stencil.at<uchar>(y, x) = (bit_set == inverted) ? 255 : 0;
      }
    }
    out.stencil = stencil;
    return out;
  }

  const ColorSpace cs = resolve_color_space(doc, entry("ColorSpace", "CS"), resources);
  const Object bpc_obj = entry("BitsPerComponent", "BPC");
  const int bpc = bpc_obj.is_number() ? static_cast<int>(bpc_obj.as_int()) : 8;
  if (bpc != 1 && bpc != 2 && bpc != 4 && bpc != 8 && bpc != 16) {
    throw PdfError("unsupported BitsPerComponent " + std::to_string(bpc));
  }

  if (cs.kind == ColorSpace::Kind::indexed) {
    // Keep raw indices, expand through the palette.
    const std::size_t row_bytes = static_cast<std::size_t>((width * bpc + 7) / 8);
    if (encoded.size() < row_bytes * static_cast<std::size_t>(height)) {
      throw PdfError("image data shorter than declared size");
    }
    const bool gray = cs.base_components == 1;
    cv::Mat img(height, width, gray ? CV_8UC1 : CV_8UC3);
    for (int y = 0; y < height; ++y) {
      const auto* row = reinterpret_cast<const unsigned char*>(encoded.data()) + row_bytes * static_cast<std::size_t>(y);
      for (int x = 0; x < width; ++x) {
        int idx = 0;
        if (bpc == 8) {
          idx = row[x];
        } else {
          const std::size_t bit = static_cast<std::size_t>(x) * static_cast<std::size_t>(bpc);
          idx = (row[bit / 8] >> (8 - bpc - static_cast<int>(bit % 8))) & ((1 << bpc) - 1);
        }
        idx = std::min(idx, cs.hival);
        const std::size_t off = static_cast<std::size_t>(idx) * static_cast<std::size_t>(cs.base_components);
        auto pal = [&](std::size_t k) -> uchar {
          return off + k < cs.lookup.size() ? static_cast<uchar>(cs.lookup[off + k]) : 0;
        };
        if (gray) {
          img.at<uchar>(y, x) = pal(0);
        } else if (cs.base_components == 4) {
          const double k = pal(3) / 255.0;
          img.at<cv::Vec3b>(y, x) = {static_cast<uchar>(255 * (1 - pal(2) / 255.0) * (1 - k)),
                                     static_cast<uchar>(255 * (1 - pal(1) / 255.0) * (1 - k)),
                                     static_cast<uchar>(255 * (1 - pal(0) / 255.0) * (1 - k))};
        } else {
          img.at<cv::Vec3b>(y, x) = {pal(2), pal(1), pal(0)};
        }
      }
    }
    out.pixels = img;
    return out;
  }

  const auto samples = unpack_samples(encoded, width, height, cs.components, bpc);
  cv::Mat img;
  if (cs.kind == ColorSpace::Kind::rgb) {
    cv::Mat rgb(height, width, CV_8UC3, const_cast<std::uint8_t*>(samples.data()));
    cv::cvtColor(rgb, img, cv::COLOR_RGB2BGR);
  } else if (cs.kind == ColorSpace::Kind::cmyk) {
    img.create(height, width, CV_8UC3);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const auto* p = samples.data() + (static_cast<std::size_t>(y) * width + x) * 4;
        const double k = p[3] / 255.0;
        img.at<cv::Vec3b>(y, x) = {static_cast<uchar>(255 * (1 - p[2] / 255.0) * (1 - k)),
                                   static_cast<uchar>(255 * (1 - p[1] / 255.0) * (1 - k)),
                                   static_cast<uchar>(255 * (1 - p[0] / 255.0) * (1 - k))};
      }
    }
  } else if (cs.kind == ColorSpace::Kind::separation) {
    img.create(height, width, CV_8UC1);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const auto* p = samples.data() + (static_cast<std::size_t>(y) * width + x) * cs.components;
        int ink = 0;
        for (int k = 0; k < cs.components; ++k) ink = std::max<int>(ink, p[k]);
        img.at<uchar>(y, x) = static_cast<uchar>(255 - ink);
      }
    }
  } else {
    img = cv::Mat(height, width, CV_8UC1, const_cast<std::uint8_t*>(samples.data())).clone();
  }
  if (inverted) cv::bitwise_not(img, img);
  out.pixels = img;
  return out;
}

class Renderer {
 public:
  Renderer(const Document& doc, cv::Mat& canvas, const Affine& device)
      : doc_(doc), canvas_(canvas), device_(device) {}

  bool any_color() const { return any_color_; }

  void run(std::string_view content, const Dict& resources, const Affine& base, int depth) {
    if (depth > 8) return;
    std::vector<std::pair<Affine, uchar>> stack;
    Affine ctm = base;
    uchar fill = 0;
    for_each_operation(content, [&](const Operation& op) {
      const auto& o = op.operands;
      const std::string& k = op.op;
      if (k == "q") {
        stack.emplace_back(ctm, fill);
      } else if (k == "Q") {
        if (!stack.empty()) {
          std::tie(ctm, fill) = stack.back();
          stack.pop_back();
        }
      } else if (k == "cm") {
        ctm = affine_from(o).then(ctm);
      } else if (k == "g" && !o.empty() && o[0].is_number()) {
        fill = static_cast<uchar>(std::clamp(o[0].as_number(), 0.0, 1.0) * 255);
      } else if (k == "rg" && o.size() >= 3) {
        fill = static_cast<uchar>(std::clamp(0.299 * o[0].as_number() + 0.587 * o[1].as_number() +
                                                 0.114 * o[2].as_number(), 0.0, 1.0) * 255);
      } else if (k == "k" && o.size() >= 4) {
        fill = static_cast<uchar>(std::clamp(1.0 - std::min(1.0, o[3].as_number() + 0.3 * o[0].as_number() +
                                                                   0.59 * o[1].as_number() + 0.11 * o[2].as_number()),
                                             0.0, 1.0) * 255);
      } else if (k == "BI") {
        Dict expanded = op.inline_image;
        for (auto [abbrev, full] : {std::pair{"F", "Filter"}, {"DP", "DecodeParms"}}) {
          if (const Object* v = find(op.inline_image, abbrev)) expanded[full] = *v;
        }
        auto decoded = doc_.decode(Stream{expanded, op.inline_data});
        draw(decode_image(doc_, expanded, std::move(decoded.data), decoded.image_filter, &resources),
             ctm, fill);
      } else if (k == "Do" && !o.empty() && o[0].is_name()) {
        const Object xobjects = doc_.get(resources, "XObject");
        if (!xobjects.is_dict()) return;
        const Object* ref = find(xobjects.dict(), o[0].name());
        if (!ref) return;
        const Object xo = doc_.resolve(*ref);
        if (!xo.is_stream()) return;
        const Object subtype = doc_.get(xo.dict(), "Subtype");
        if (subtype.is_name("Image")) {
          auto decoded = doc_.decode(xo.stream());
          draw(decode_image(doc_, xo.dict(), std::move(decoded.data), decoded.image_filter, &resources),
               ctm, fill);
        } else if (subtype.is_name("Form")) {
          Affine fm;
          const Object m = doc_.get(xo.dict(), "Matrix");
          if (m.is_array()) fm = affine_from(std::vector<Object>(m.array().begin(), m.array().end()));
          const Object res = doc_.get(xo.dict(), "Resources");
          run(doc_.decode(xo.stream()).data, res.is_dict() ? res.dict() : resources, fm.then(ctm), depth + 1);
        }
      }
    });
  }

 private:
  void draw(const DecodedImage& image, const Affine& ctm, uchar fill) {
    const cv::Mat& src = image.pixels.empty() ? image.stencil : image.pixels;
    const double w = src.cols, h = src.rows;
    // Image space (pixel indices, row 0 on top) -> unit square -> user -> device.
    const Affine to_unit{1.0 / w, 0, 0, -1.0 / h, 0, 1};
    const Affine m = to_unit.then(ctm).then(device_);
    // Continuous mapping -> pixel-index mapping expected by warpAffine.
    const double e = m.a * 0.5 + m.c * 0.5 + m.e - 0.5;
    const double f = m.b * 0.5 + m.d * 0.5 + m.f - 0.5;

    double min_x = 1e18, min_y = 1e18, max_x = -1e18, max_y = -1e18;
    for (auto [cx, cy] : {std::pair{0.0, 0.0}, {w, 0.0}, {0.0, h}, {w, h}}) {
      const auto p = m.apply(cx, cy);
      min_x = std::min(min_x, p.x);
      min_y = std::min(min_y, p.y);
      max_x = std::max(max_x, p.x);
      max_y = std::max(max_y, p.y);
    }
    const cv::Rect bounds(cv::Point(static_cast<int>(std::floor(min_x)), static_cast<int>(std::floor(min_y))),
                          cv::Point(static_cast<int>(std::ceil(max_x)), static_cast<int>(std::ceil(max_y))));
    const cv::Rect roi = bounds & cv::Rect(0, 0, canvas_.cols, canvas_.rows);
    if (roi.empty()) return;

    cv::Mat M = (cv::Mat_<double>(2, 3) << m.a, m.c, e - roi.x, m.b, m.d, f - roi.y);
    cv::Mat coverage(src.rows, src.cols, CV_8UC1, cv::Scalar(255));
    cv::Mat warped_cov;
    cv::warpAffine(coverage, warped_cov, M, roi.size(), cv::INTER_NEAREST, cv::BORDER_CONSTANT, cv::Scalar(0));
    cv::Mat target = canvas_(roi);

    if (image.pixels.empty()) {
      cv::Mat warped_mask;
      cv::warpAffine(image.stencil, warped_mask, M, roi.size(), cv::INTER_LINEAR, cv::BORDER_CONSTANT, cv::Scalar(0));
      cv::Mat paint = (warped_mask > 127) & (warped_cov > 0);
      target.setTo(cv::Scalar(fill, fill, fill), paint);
      return;
    }
    cv::Mat src_bgr = src;
    if (src.channels() == 1) {
      cv::cvtColor(src, src_bgr, cv::COLOR_GRAY2BGR);
    } else {
      any_color_ = true;
    }
    cv::Mat warped;
    cv::warpAffine(src_bgr, warped, M, roi.size(), cv::INTER_LINEAR, cv::BORDER_REPLICATE);
    warped.copyTo(target, warped_cov);
  }

  const Document& doc_;
  cv::Mat& canvas_;
  Affine device_;
  bool any_color_ = false;
};

}  // namespace

cv::Mat render_page(const Document& doc, int page, int dpi) {
  if (dpi <= 0) throw PdfError("dpi must be positive");
  const auto box = page_box(doc, page);
  const double scale = dpi / 72.0;
  const double width_px = (box[2] - box[0]) * scale;
  const double height_px = (box[3] - box[1]) * scale;
  if (width_px < 1 || height_px < 1 || width_px > 30000 || height_px > 30000) {
    throw PdfError("page size out of range");
  }
  cv::Mat canvas(static_cast<int>(std::lround(height_px)), static_cast<int>(std::lround(width_px)), CV_8UC3,
                 cv::Scalar(255, 255, 255));
  const Affine device{scale, 0, 0, -scale, -box[0] * scale, box[3] * scale};

  const Dict& p = doc.page(page);
  const Object resources = doc.get(p, "Resources");
  static const Dict kEmpty;
  Renderer renderer(doc, canvas, device);
  renderer.run(doc.page_contents(page), resources.is_dict() ? resources.dict() : kEmpty, Affine{}, 0);

  const Object rotate = doc.get(p, "Rotate");
  const int rot = rotate.is_number() ? static_cast<int>(((rotate.as_int() % 360) + 360) % 360) : 0;
  if (rot == 90) cv::rotate(canvas, canvas, cv::ROTATE_90_CLOCKWISE);
  else if (rot == 180) cv::rotate(canvas, canvas, cv::ROTATE_180);
  else if (rot == 270) cv::rotate(canvas, canvas, cv::ROTATE_90_COUNTERCLOCKWISE);

  if (!renderer.any_color()) cv::cvtColor(canvas, canvas, cv::COLOR_BGR2GRAY);
  return canvas;
}

}  // namespace parlagest::pdf
