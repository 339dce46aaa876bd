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
#include <optional>
#include <string>
#include <string_view>

#include "parlagest/document.hpp"

namespace parlagest {

/// Milliseconds since the epoch at UTC midnight of the date. Throws
/// ValidationError for dates that do not exist.
std::int64_t timestamp_ms(int day, int month, int year);

bool is_valid_date(int day, int month, int year);

/// Month number for a German month name ("Januar", "Jänner", "März", ...),
/// case-insensitive.
std::optional<int> german_month(std::string_view name);

/// Session date, title and legislature/session subtitle. The date comes from
/// the file name when it carries one, otherwise from the first page of
/// `doc_text`. Throws MetadataMissingError when no date is found.
SessionMetadata extract_metadata(std::string_view doc_text, std::string_view filename,
                                 std::string_view parliament);

/// "DD.MM.YYYY" with zero padding.
std::string format_date(int day, int month, int year);

/// Legislature number parsed back out of a subtitle, if any.
std::optional<int> legislature_of(const SessionMetadata& metadata);

}  // namespace parlagest
