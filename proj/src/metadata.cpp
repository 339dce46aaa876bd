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

#include "parlagest/metadata.hpp"

#include <array>
#include <chrono>
#include <regex>

#include "parlagest/error.hpp"
#include "parlagest/unicode.hpp"

namespace parlagest {

bool is_valid_date(int day, int month, int year) {
  using namespace std::chrono;
  if (day < 1 || day > 31 || month < 1 || month > 12) return false;
  return year_month_day{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                        std::chrono::day{static_cast<unsigned>(day)}}
      .ok();
}

std::int64_t timestamp_ms(int day, int month, int year) {
  if (!is_valid_date(day, month, year)) {
    throw ValidationError("invalid date " + std::to_string(day) + "." + std::to_string(month) + "." +
                          std::to_string(year));
  }
  using namespace std::chrono;
  const sys_days d{year_month_day{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                                  std::chrono::day{static_cast<unsigned>(day)}}};
  return duration_cast<milliseconds>(d.time_since_epoch()).count();
}

std::optional<int> german_month(std::string_view name) {
  static const std::array<std::pair<std::string_view, int>, 14> kMonths{{
      {"januar", 1}, {"jänner", 1}, {"februar", 2}, {"feber", 2}, {"märz", 3}, {"april", 4},
      {"mai", 5}, {"juni", 6}, {"juli", 7}, {"august", 8}, {"september", 9}, {"oktober", 10},
      {"november", 11}, {"dezember", 12},
  }};
  const std::string lower = unicode::to_lower(name);
  for (const auto& [n, m] : kMonths) {
    if (n == lower) return m;
  }
  return std::nullopt;
}

std::string format_date(int day, int month, int year) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d.%02d.%04d", day, month, year);
  return buf;
}

std::optional<int> legislature_of(const SessionMetadata& metadata) {
  static const std::regex re(R"(^(\d+)\.Wahlperiode__)");
  std::smatch m;
  if (std::regex_search(metadata.subtitle, m, re)) return std::stoi(m[1]);
  return std::nullopt;
}

namespace {

struct Date {
  int day, month, year;
};

int to_int(const std::ssub_match& m) {
  const std::string s = m.str();
  return s.size() > 9 ? -1 : std::stoi(s);
}

// Months spelled out, in the forms used by German and Austrian protocols.
// std::regex works on bytes here, which is fine for these literals.
const char* const kMonthAlternatives =
    "Januar|Jänner|Februar|Feber|März|April|Mai|Juni|Juli|August|September|Oktober|November|Dezember";

std::optional<Date> earliest_text_date(const std::string& text) {
  static const std::regex numeric(R"((^|[^\d])(\d{1,2})\.\s?(\d{1,2})\.\s?(\d{4})(?!\d))");
  static const std::regex spelled(std::string(R"((^|[^\d])(\d{1,2})\.\s*()") + kMonthAlternatives +
                                  R"()\s+(\d{4})(?!\d))",
                                  std::regex::ECMAScript | std::regex::icase);
  std::optional<std::pair<std::ptrdiff_t, Date>> best;
  auto consider = [&](std::ptrdiff_t pos, Date d) {
    if (!is_valid_date(d.day, d.month, d.year)) return false;
    if (!best || pos < best->first) best = {pos, d};
    return true;
  };
  for (std::sregex_iterator it(text.begin(), text.end(), numeric), end; it != end; ++it) {
    if (consider(it->position(2), Date{to_int((*it)[2]), to_int((*it)[3]), to_int((*it)[4])})) break;
  }
  for (std::sregex_iterator it(text.begin(), text.end(), spelled), end; it != end; ++it) {
    const auto month = german_month((*it)[3].str());
    if (month && consider(it->position(2), Date{to_int((*it)[2]), *month, to_int((*it)[4])})) break;
  }
  if (best) return best->second;
  return std::nullopt;
}

}  // namespace

SessionMetadata extract_metadata(std::string_view doc_text, std::string_view filename,
                                 std::string_view parliament) {
  const std::string name(filename);
  std::optional<Date> date;
  std::optional<int> legislature;
  std::optional<int> session;

  static const std::regex full(R"((\d+)_(\d+)_(\d{1,2})\.(\d{1,2})\.(\d{4}))");
  static const std::regex date_only(R"((^|[^\d])(\d{1,2})\.(\d{1,2})\.(\d{4})(?!\d))");
  static const std::regex iso(R"((^|[^\d])(\d{4})-(\d{2})-(\d{2})(?!\d))");
  std::smatch m;
  if (std::regex_search(name, m, full)) {
    const Date d{to_int(m[3]), to_int(m[4]), to_int(m[5])};
    if (is_valid_date(d.day, d.month, d.year)) {
      date = d;
      legislature = to_int(m[1]);
      session = to_int(m[2]);
    }
  }
  if (!date && std::regex_search(name, m, date_only)) {
    const Date d{to_int(m[2]), to_int(m[3]), to_int(m[4])};
    if (is_valid_date(d.day, d.month, d.year)) date = d;
  }
  if (!date && std::regex_search(name, m, iso)) {
    const Date d{to_int(m[4]), to_int(m[3]), to_int(m[2])};
    if (is_valid_date(d.day, d.month, d.year)) date = d;
  }

  const std::string first_page(doc_text.substr(0, std::min(doc_text.find('\f'), doc_text.size())));
  if (!date) date = earliest_text_date(first_page);
  if (!date) throw MetadataMissingError("no session date in file name or first page");

  if (!legislature) {
    static const std::regex wp(R"((\d{1,3})\.\s*Wahlperiode)", std::regex::icase);
    if (std::regex_search(first_page, m, wp)) legislature = to_int(m[1]);
  }
  if (!session) {
    static const std::regex sitzung(R"((\d{1,4})\.\s*Sitzung)", std::regex::icase);
    if (std::regex_search(first_page, m, sitzung)) session = to_int(m[1]);
  }

  SessionMetadata meta;
  meta.day = date->day;
  meta.month = date->month;
  meta.year = date->year;
  meta.timestamp_ms = timestamp_ms(meta.day, meta.month, meta.year);
  meta.title = std::string(parliament) + "-Plenarprotokoll vom " + format_date(meta.day, meta.month, meta.year);
  if (legislature && session) {
    meta.subtitle = std::to_string(*legislature) + ".Wahlperiode__" + std::to_string(*session) + ".Sitzung";
  }
  return meta;
}

}  // namespace parlagest
