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

#include <string>
#include <string_view>

namespace parlagest::gzip {

/// gzip member with a zero modification time, so equal input gives equal bytes.
std::string compress(std::string_view data, int level = 6);

/// Inflates a gzip (or zlib) stream. Throws Error on corrupt input.
std::string decompress(std::string_view data);

bool is_gzip(std::string_view data);

}  // namespace parlagest::gzip
