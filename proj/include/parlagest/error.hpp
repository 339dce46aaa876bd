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

#include <stdexcept>
#include <string>

namespace parlagest {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration detected before any work starts (bad paths,
/// missing OCR engine, out-of-range numeric options).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Manifest syntax or invariant violation. `line` is 1-based; 0 when the
/// error is not tied to a line.
class ManifestError : public Error {
 public:
  ManifestError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// An operation was invoked on a value in the wrong state.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A value violates one of its documented invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Structural problem with a PDF file.
class PdfError : public Error {
 public:
  using Error::Error;
};

/// Error tied to one document of a batch.
class DocumentError : public Error {
 public:
  DocumentError(std::string document_id, const std::string& what)
      : Error(document_id + ": " + what), document_id_(std::move(document_id)) {}
  const std::string& document_id() const noexcept { return document_id_; }

 private:
  std::string document_id_;
};

class ClassificationError : public DocumentError {
 public:
  using DocumentError::DocumentError;
};

class ExtractionError : public DocumentError {
 public:
  using DocumentError::DocumentError;
};

class MetadataMissingError : public Error {
 public:
  using Error::Error;
};

class OcrError : public DocumentError {
 public:
  OcrError(std::string document_id, int page_index, const std::string& what,
           std::string engine_stderr)
      : DocumentError(std::move(document_id),
                      "page " + std::to_string(page_index) + ": " + what),
        page_index_(page_index),
        engine_stderr_(std::move(engine_stderr)) {}
  int page_index() const noexcept { return page_index_; }
  const std::string& engine_stderr() const noexcept { return engine_stderr_; }

 private:
  int page_index_;
  std::string engine_stderr_;
};

/// Sidecar payload rejected by attach_external_annotations.
class PayloadError : public Error {
 public:
  using Error::Error;
};

/// Failure while reading an XMI file.
class XmiError : public Error {
 public:
  enum class Kind { malformed, dangling_reference, offset_out_of_range, schema };
  XmiError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace parlagest
