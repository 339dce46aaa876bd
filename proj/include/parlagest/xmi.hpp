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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "parlagest/document.hpp"

namespace parlagest::xmi {

// Namespace URIs of the emitted element prefixes.
namespace ns {
inline constexpr const char* kXmi = "http://www.omg.org/XMI";
inline constexpr const char* kCas = "http:///uima/cas.ecore";
inline constexpr const char* kMetadata = "http:///de/tudarmstadt/ukp/dkpro/core/api/metadata/type.ecore";
inline constexpr const char* kSegmentation = "http:///de/tudarmstadt/ukp/dkpro/core/api/segmentation/type.ecore";
inline constexpr const char* kPos = "http:///de/tudarmstadt/ukp/dkpro/core/api/lexmorph/type/pos.ecore";
inline constexpr const char* kMorph = "http:///de/tudarmstadt/ukp/dkpro/core/api/lexmorph/type/morph.ecore";
inline constexpr const char* kDependency = "http:///de/tudarmstadt/ukp/dkpro/core/api/syntax/type/dependency.ecore";
inline constexpr const char* kNer = "http:///de/tudarmstadt/ukp/dkpro/core/api/ner/type.ecore";
inline constexpr const char* kAnnotation = "http:///org/texttechnologylab/annotation.ecore";
inline constexpr const char* kParlagest = "http:///org/parlagest/provenance.ecore";
}  // namespace ns

/// Serializes a document. Throws ValidationError (naming the invariant)
/// when the document is not valid.
std::string to_xmi(const AnnotatedDocument& doc);

/// Parses XMI text produced by to_xmi or an equivalent writer.
AnnotatedDocument from_xmi(std::string_view xml);

/// Writes `<dir>/<document_id>.xmi.gz` (or `.xmi` without gzip) and returns
/// the path.
std::filesystem::path write_xmi(const AnnotatedDocument& doc, const std::filesystem::path& dir, bool gzip = true);

/// Reads plain or gzip-compressed XMI.
AnnotatedDocument read_xmi(const std::filesystem::path& path);

/// `<out>/<parliament>/xmi/<legislature>` or `<out>/<parliament>/xmi`.
std::filesystem::path output_dir(const std::filesystem::path& out, const std::string& parliament,
                                 std::optional<int> legislature);

/// File name `write_xmi` uses for a document id.
std::string file_name(const std::string& document_id, bool gzip);

}  // namespace parlagest::xmi
