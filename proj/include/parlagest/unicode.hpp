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

#include <cstddef>
#include <string>
#include <string_view>

// UTF-8 helpers. Offsets throughout the library count Unicode scalar
// values, so most text is handled as std::u32string internally.
namespace parlagest::unicode {

/// Decodes UTF-8; malformed sequences become U+FFFD.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view text);
std::string encode(char32_t c);

/// Number of scalar values in a UTF-8 string.
std::size_t length(std::string_view utf8);

/// Byte offset of the code point with index `cp_index` (or size() at the end).
std::size_t byte_offset(std::string_view utf8, std::size_t cp_index);

/// Slice by code point offsets.
std::string substr(std::string_view utf8, std::size_t begin, std::size_t end);

std::string to_nfc(std::string_view utf8);
std::string to_lower(std::string_view utf8);
std::u32string to_lower(std::u32string_view text);

bool is_letter(char32_t c);
bool is_digit(char32_t c);
bool is_upper(char32_t c);
bool is_space(char32_t c);
bool is_control(char32_t c);

/// True when the code point may appear in an XML 1.0 document.
bool is_xml_char(char32_t c);

}  // namespace parlagest::unicode
