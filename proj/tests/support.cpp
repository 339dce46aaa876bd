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

#include "support.hpp"

#include <expat.h>

#include <opencv2/freetype.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

#include "parlagest/pdf.hpp"
#include "parlagest/process.hpp"
#include "parlagest/unicode.hpp"

namespace testsupport {

namespace fs = std::filesystem;
using namespace parlagest;

fs::path test_data(std::string_view name) { return fs::path(PARLAGEST_TEST_DATA_DIR) / name; }
fs::path source_dir() { return fs::path(PARLAGEST_SOURCE_DIR); }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, std::string_view data) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

cv::Mat render_text_page(const std::vector<std::string>& paragraphs, int dpi, double font_pt) {
  const int width = static_cast<int>(std::lround(595.276 / 72.0 * dpi));
  const int height = static_cast<int>(std::lround(841.89 / 72.0 * dpi));
  // The freetype module only draws on 3-channel images.
  cv::Mat page(height, width, CV_8UC3, cv::Scalar(255, 255, 255));
  auto ft = cv::freetype::createFreeType2();
  ft->loadFontData(test_data("DejaVuSerif.ttf").string(), 0);

  const int font_px = static_cast<int>(std::lround(font_pt / 72.0 * dpi));
  const int margin = dpi;  // one inch
  const int max_width = width - 2 * margin;
  const int line_step = font_px * 3 / 2;
  int y = margin + font_px;

  for (const auto& paragraph : paragraphs) {
    std::istringstream words(paragraph);
    std::string line, word;
    auto flush = [&] {
      if (line.empty()) return;
      ft->putText(page, line, cv::Point(margin, y), font_px, cv::Scalar(0, 0, 0), -1, cv::LINE_AA, true);
      y += line_step;
      line.clear();
    };
    while (words >> word) {
      const std::string candidate = line.empty() ? word : line + " " + word;
      int baseline = 0;
      const cv::Size size = ft->getTextSize(candidate, font_px, -1, &baseline);
      if (size.width > max_width && !line.empty()) {
        flush();
        line = word;
      } else {
        line = candidate;
      }
    }
    flush();
    y += line_step;
  }
  cv::Mat gray;
  cv::cvtColor(page, gray, cv::COLOR_BGR2GRAY);
  return gray;
}

void add_salt_and_pepper(cv::Mat& gray, double fraction, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> row(0, gray.rows - 1), col(0, gray.cols - 1);
  const auto n = static_cast<std::size_t>(fraction * gray.rows * gray.cols);
  for (std::size_t i = 0; i < n; ++i) gray.at<std::uint8_t>(row(rng), col(rng)) = 0;
  for (std::size_t i = 0; i < n; ++i) gray.at<std::uint8_t>(row(rng), col(rng)) = 255;
}

void write_text_pdf(const fs::path& path, const std::vector<std::vector<std::string>>& pages) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  pdf::Writer w;
  for (const auto& lines : pages) w.add_text_page(lines);
  w.save(path);
}

void write_image_pdf(const fs::path& path, const std::vector<cv::Mat>& pages) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  pdf::Writer w;
  for (const auto& img : pages) w.add_image_page(img);
  w.save(path);
}

DocumentRecord record_for(const fs::path& pdf, const std::string& id, const std::string& parliament) {
  DocumentRecord r;
  r.id = id;
  r.parliament = parliament;
  r.locator = pdf.string();
  r.local_path = pdf;
  return r;
}

int reference_osa(const std::u32string& a, const std::u32string& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const int sub = a[i - 1] == b[j - 1] ? 0 : 1;
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + sub});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
      }
    }
  }
  return d[n][m];
}

std::optional<BruteForceHit> brute_force_lookup(const std::vector<std::pair<std::u32string, std::uint64_t>>& dict,
                                                const std::u32string& query, int max_distance) {
  std::optional<BruteForceHit> best;
  for (const auto& [word, freq] : dict) {
    const int d = reference_osa(query, word);
    if (d > max_distance) continue;
    const bool better = !best || d < best->distance || (d == best->distance && freq > best->frequency) ||
                        (d == best->distance && freq == best->frequency && word < best->word);
    if (better) best = BruteForceHit{word, d, freq};
  }
  return best;
}

namespace {

cv::Mat neighbourhood(const cv::Mat& gray, bool take_min) {
  cv::Mat out(gray.size(), CV_8UC1);
  for (int y = 0; y < gray.rows; ++y) {
    for (int x = 0; x < gray.cols; ++x) {
      int v = take_min ? 255 : 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int yy = y + dy, xx = x + dx;
          if (yy < 0 || yy >= gray.rows || xx < 0 || xx >= gray.cols) continue;
          const int p = gray.at<std::uint8_t>(yy, xx);
          v = take_min ? std::min(v, p) : std::max(v, p);
        }
      }
      out.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(v);
    }
  }
  return out;
}

}  // namespace

cv::Mat reference_erode3(const cv::Mat& gray) { return neighbourhood(gray, true); }
cv::Mat reference_dilate3(const cv::Mat& gray) { return neighbourhood(gray, false); }

cv::Mat reference_median3(const cv::Mat& gray) {
  cv::Mat out(gray.size(), CV_8UC1);
  for (int y = 0; y < gray.rows; ++y) {
    for (int x = 0; x < gray.cols; ++x) {
      std::array<int, 9> v{};
      int k = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int yy = std::clamp(y + dy, 0, gray.rows - 1);
          const int xx = std::clamp(x + dx, 0, gray.cols - 1);
          v[k++] = gray.at<std::uint8_t>(yy, xx);
        }
      }
      std::nth_element(v.begin(), v.begin() + 4, v.end());
      out.at<std::uint8_t>(y, x) = static_cast<std::uint8_t>(v[4]);
    }
  }
  return out;
}

std::int64_t timegm_ms(int day, int month, int year) {
  std::tm tm{};
  tm.tm_mday = day;
  tm.tm_mon = month - 1;
  tm.tm_year = year - 1900;
  return static_cast<std::int64_t>(timegm(&tm)) * 1000;
}

namespace {

struct Canonicalizer {
  std::ostringstream out;
  int depth = 0;
  std::string text;

  static std::string expand(const char* name) {
    std::string_view n(name);
    const auto sep = n.find(' ');
    if (sep == std::string_view::npos) return std::string(n);
    return "{" + std::string(n.substr(0, sep)) + "}" + std::string(n.substr(sep + 1));
  }

  static std::string escape(std::string_view s) {
    std::string r;
    for (char c : s) {
      switch (c) {
        case '&': r += "&amp;"; break;
        case '<': r += "&lt;"; break;
        case '>': r += "&gt;"; break;
        case '"': r += "&quot;"; break;
        case '\t': r += "&#9;"; break;
        case '\n': r += "&#10;"; break;
        case '\r': r += "&#13;"; break;
        default: r.push_back(c);
      }
    }
    return r;
  }

  void flush_text() {
    if (text.find_first_not_of(" \t\r\n") != std::string::npos) {
      out << std::string(depth * 2, ' ') << "#text \"" << escape(text) << "\"\n";
    }
    text.clear();
  }
};

void XMLCALL canon_start(void* data, const XML_Char* name, const XML_Char** atts) {
  auto* c = static_cast<Canonicalizer*>(data);
  c->flush_text();
  std::vector<std::pair<std::string, std::string>> attrs;
  for (int i = 0; atts[i]; i += 2) attrs.emplace_back(Canonicalizer::expand(atts[i]), atts[i + 1]);
  std::sort(attrs.begin(), attrs.end());
  c->out << std::string(c->depth * 2, ' ') << "<" << Canonicalizer::expand(name);
  for (const auto& [k, v] : attrs) c->out << " " << k << "=\"" << Canonicalizer::escape(v) << "\"";
  c->out << ">\n";
  ++c->depth;
}

void XMLCALL canon_end(void* data, const XML_Char*) {
  auto* c = static_cast<Canonicalizer*>(data);
  c->flush_text();
  --c->depth;
}

void XMLCALL canon_text(void* data, const XML_Char* s, int len) {
  static_cast<Canonicalizer*>(data)->text.append(s, static_cast<std::size_t>(len));
}

}  // namespace

std::string canonical_xml(std::string_view xml) {
  Canonicalizer c;
  XML_Parser p = XML_ParserCreateNS("UTF-8", ' ');
  XML_SetUserData(p, &c);
  XML_SetElementHandler(p, canon_start, canon_end);
  XML_SetCharacterDataHandler(p, canon_text);
  const bool ok = XML_Parse(p, xml.data(), static_cast<int>(xml.size()), XML_TRUE) == XML_STATUS_OK;
  XML_ParserFree(p);
  if (!ok) throw std::runtime_error("canonical_xml: malformed input");
  return c.out.str();
}

std::optional<std::string> ocr_engine() {
  static std::once_flag once;
  static std::optional<std::string> engine;
  std::call_once(once, [] {
    TempDir tmp("parlagest-engine-probe");
    cv::Mat probe(200, 900, CV_8UC1, cv::Scalar(255));
    cv::putText(probe, "Probe", cv::Point(40, 130), cv::FONT_HERSHEY_SIMPLEX, 3.0, cv::Scalar(0), 6);
    const auto png = tmp.path() / "probe.png";
    cv::imwrite(png.string(), probe);

    std::vector<std::string> candidates;
    if (const char* env = std::getenv("PARLAGEST_TEST_OCR_ENGINE"); env && *env) candidates.push_back(env);
    candidates.push_back("tesseract");
    candidates.push_back((source_dir() / "tools" / "tesseract_shim.py").string());
    for (const auto& c : candidates) {
      if (!find_executable(c)) continue;
      const auto out = tmp.path() / "probe-out";
      const auto r = run_process({c, png.string(), out.string(), "-l", "deu"});
      if (r.exit_code == 0 && fs::exists(out.string() + ".txt")) {
        engine = c;
        return;
      }
    }
  });
  return engine;
}

AnnotatedDocument session_opening_document() {
  constexpr std::size_t kSentenceBegin = 2733;
  constexpr std::size_t kLength = 48634;
  const std::string sentence =
      "Alterspräsident Winfried Kretschmann: Meine sehr verehrten Damen und Herren, liebe Kolleginnen und "
      "Kollegen!";

  auto filler = [](std::size_t n) {
    static const std::string words = "Landtag Sitzung Beratung Antrag Haushalt Beschluss ";
    std::string s;
    while (s.size() < n) s += words;
    s.resize(n);
    return s;
  };

  AnnotatedDocument doc;
  doc.document_id = "Plenarprotokoll_17_1_11.05.2021_S._1-13";
  doc.parliament = "Landtag von Baden-Württemberg";
  const std::size_t sentence_len = unicode::length(sentence);
  doc.sofa = filler(kSentenceBegin - 1) + "\n" + sentence + "\n" +
             filler(kLength - kSentenceBegin - sentence_len - 1);

  struct Row {
    std::size_t begin, end;
    const char* lemma;
    const char* pos;
  };
  const Row rows[] = {
      {2733, 2748, "Alterspräsident", "NN"}, {2749, 2757, "Winfried", "NE"}, {2758, 2769, "Kretschmann", "NE"},
      {2769, 2770, ":", "$."},               {2771, 2776, "Meine", "PPOSAT"}, {2777, 2781, "sehr", "ADV"},
      {2782, 2791, "verehren", "ADJA"},      {2792, 2797, "Dame", "NN"},     {2798, 2801, "und", "KON"},
      {2802, 2808, "Herr", "NN"},            {2808, 2809, ",", "$,"},         {2810, 2815, "lieb", "ADJA"},
      {2816, 2827, "Kollegin", "NN"},        {2828, 2831, "und", "KON"},     {2832, 2840, "Kollege", "NN"},
      {2840, 2841, "!", "$."},
  };
  doc.sentences.push_back(Span{2733, 2841});
  for (std::size_t i = 0; i < std::size(rows); ++i) {
    const Span s{rows[i].begin, rows[i].end};
    doc.lemmas.push_back(Lemma{s, rows[i].lemma});
    doc.pos_tags.push_back(PosTag{s, rows[i].pos});
    Token t;
    t.span = s;
    t.lemma = i;
    t.pos = i;
    doc.tokens.push_back(t);
  }
  doc.morph.push_back(MorphFeatures{Span{2749, 2757}, "Case=Nom|Gender=Masc|Number=Sing"});
  doc.morph.push_back(MorphFeatures{Span{2758, 2769}, "Case=Nom|Gender=Masc|Number=Sing"});
  doc.tokens[1].morph = 0;
  doc.tokens[2].morph = 1;
  doc.dependencies.push_back(Dependency{Span{2733, 2748}, 2, 0, "PNC", "basic"});
  doc.dependencies.push_back(Dependency{Span{2749, 2757}, 2, 1, "PNC", "basic"});

  SessionMetadata m;
  m.day = 11;
  m.month = 5;
  m.year = 2021;
  m.timestamp_ms = 1620691200000;
  m.subtitle = "17.Wahlperiode__1.Sitzung";
  m.title = "Landtag von Baden-Württemberg-Plenarprotokoll vom 11.05.2021";
  doc.metadata = m;

  auto& dm = doc.document_meta;
  dm.document_title = m.title;
  dm.document_id = "Plenarprotokoll_17_1_11.05.2021_S._1-13.xmi.gz";
  dm.document_base_uri = "file:/resources/corpora/parlamentary_germany/";
  dm.document_uri = dm.document_base_uri + "BadenWuertemberg/xmi/17/Plenarprotokoll_17_1_11.05.2021_S._1-13.xmi.gz";
  return doc;
}

std::vector<std::string> german_paragraphs() {
  return {
      "Meine sehr verehrten Damen und Herren, ich eröffne die Sitzung des Landtags. Zu Beginn möchte ich "
      "alle Abgeordneten herzlich begrüßen. Wir haben heute eine lange Tagesordnung vor uns.",
      "Der Haushalt des Landes ist ein wichtiges Thema für die Bürgerinnen und Bürger. Die Regierung hat "
      "einen Entwurf vorgelegt, über den wir in den nächsten Wochen beraten werden. Ich bitte um eine "
      "sachliche Debatte.",
      "Die Schulen und Hochschulen brauchen mehr Lehrer und bessere Gebäude. Auch die Gemeinden erwarten "
      "Unterstützung bei der Finanzierung ihrer Aufgaben. Wir stimmen nun über den Antrag ab.",
  };
}

}  // namespace testsupport

namespace testsupport {

AnnotatedDocument random_document(std::mt19937& rng) {
  static const std::vector<std::string> words = {
      "Landtag", "Präsident", "Sitzung", "Straße", "Ökologie", "über", "&", "<Antrag>", "\"Zitat\"",
      "Drucksache", "17/123", "€", "Maß", "Kollegen", "!", ",", "Bürgerinnen", "a&b", "Ä", "x"};
  static const std::vector<std::string> separators = {" ", "  ", "\n", "\t", " \n "};
  static const std::vector<std::string> features = {"Case=Nom", "Case=Dat", "Gender=Masc", "Gender=Fem",
                                                    "Number=Sing", "Number=Plur", "Person=3"};
  static const std::vector<std::string> parliaments = {"Bundestag", "Landtag von Baden-Württemberg",
                                                       "Nationalrat", "Bürgerschaft & Senat"};
  auto pick = [&rng](const auto& v) -> const auto& {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  auto chance = [&rng](double p) { return std::bernoulli_distribution(p)(rng); };

  AnnotatedDocument doc;
  const auto n_tokens = std::uniform_int_distribution<std::size_t>(0, 20)(rng);
  std::size_t offset = 0;
  if (chance(0.3)) {
    doc.sofa = pick(separators);
    offset = unicode::length(doc.sofa);
  }
  for (std::size_t i = 0; i < n_tokens; ++i) {
    if (i > 0) {
      const auto& sep = pick(separators);
      doc.sofa += sep;
      offset += unicode::length(sep);
    }
    const auto& w = pick(words);
    doc.sofa += w;
    Token t;
    t.span = Span{offset, offset + unicode::length(w)};
    t.order = chance(0.8) ? 0 : std::uniform_int_distribution<int>(0, 3)(rng);
    doc.tokens.push_back(t);
    offset = t.span.end;
  }
  if (chance(0.5)) doc.sofa += "\n";

  // Sentences cover consecutive token runs.
  for (std::size_t i = 0; i < doc.tokens.size();) {
    const auto run = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const std::size_t last = std::min(doc.tokens.size(), i + run) - 1;
    doc.sentences.push_back(Span{doc.tokens[i].span.begin, doc.tokens[last].span.end});
    i = last + 1;
  }

  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    Token& t = doc.tokens[i];
    if (chance(0.7)) {
      t.lemma = doc.lemmas.size();
      doc.lemmas.push_back(Lemma{t.span, pick(words)});
    }
    if (chance(0.7)) {
      t.pos = doc.pos_tags.size();
      doc.pos_tags.push_back(PosTag{t.span, chance(0.5) ? "NN" : "$,"});
    }
    if (chance(0.4)) {
      MorphFeatures::Features f;
      const auto n = std::uniform_int_distribution<int>(1, 3)(rng);
      for (int k = 0; k < n; ++k) {
        const auto& kv = pick(features);
        const auto eq = kv.find('=');
        f.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
      }
      t.morph = doc.morph.size();
      doc.morph.push_back(MorphFeatures::from_features(t.span, f));
    }
  }
  if (!doc.tokens.empty()) {
    std::uniform_int_distribution<std::size_t> any(0, doc.tokens.size() - 1);
    const auto n_deps = std::uniform_int_distribution<std::size_t>(0, doc.tokens.size())(rng);
    for (std::size_t k = 0; k < n_deps; ++k) {
      Dependency d;
      d.dependent = any(rng);
      d.governor = chance(0.2) ? d.dependent : any(rng);
      d.span = doc.tokens[d.dependent].span;
      d.type = d.governor == d.dependent ? "ROOT" : (chance(0.5) ? "nk" : "PNC");
      d.flavor = chance(0.8) ? "basic" : "enhanced";
      doc.dependencies.push_back(d);
    }
    const auto n_ents = std::uniform_int_distribution<int>(0, 2)(rng);
    for (int k = 0; k < n_ents; ++k) {
      std::size_t a = any(rng), b = any(rng);
      if (a > b) std::swap(a, b);
      doc.entities.push_back(NamedEntity{Span{doc.tokens[a].span.begin, doc.tokens[b].span.end},
                                         chance(0.5) ? "PER" : "LOC"});
    }
  }

  doc.parliament = pick(parliaments);
  doc.document_id = "doc-" + std::to_string(std::uniform_int_distribution<int>(0, 99999)(rng));
  doc.provenance = chance(0.5) ? Provenance::ocr : Provenance::native_text;
  doc.script = doc.provenance == Provenance::ocr && chance(0.5) ? Script::fraktur : Script::antiqua;
  doc.annotation_note = chance(0.5) ? "sidecar" : "";

  auto& dm = doc.document_meta;
  dm.document_id = doc.document_id + ".xmi.gz";
  dm.document_base_uri = chance(0.8) ? "file:/srv/out/" : "";
  dm.document_uri = dm.document_base_uri.empty() ? "" : dm.document_base_uri + dm.document_id;
  dm.is_last_segment = chance(0.5);
  if (chance(0.6)) {
    SessionMetadata m;
    m.year = std::uniform_int_distribution<int>(1946, 2021)(rng);
    m.month = std::uniform_int_distribution<int>(1, 12)(rng);
    m.day = std::uniform_int_distribution<int>(1, 28)(rng);
    m.timestamp_ms = timegm_ms(m.day, m.month, m.year);
    char date[16];
    std::snprintf(date, sizeof date, "%02d.%02d.%04d", m.day, m.month, m.year);
    m.title = doc.parliament + "-Plenarprotokoll vom " + date;
    if (chance(0.7)) {
      m.subtitle = std::to_string(std::uniform_int_distribution<int>(1, 20)(rng)) + ".Wahlperiode__" +
                   std::to_string(std::uniform_int_distribution<int>(1, 150)(rng)) + ".Sitzung";
    }
    dm.document_title = m.title;
    doc.metadata = m;
  } else {
    dm.document_title = doc.parliament + "-Plenarprotokoll";
  }
  return doc;
}

}  // namespace testsupport
