// Copyright 2026 The Micrograph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace micrograph {

// Base for every error raised by the library. `kind()` is a stable
// machine-readable name used in diagnostics and CLI output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define MICROGRAPH_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& message) : Error(#Name, message) {}   \
  }

MICROGRAPH_DEFINE_ERROR(SyntaxError);
MICROGRAPH_DEFINE_ERROR(DuplicateError);
MICROGRAPH_DEFINE_ERROR(EncodingError);
MICROGRAPH_DEFINE_ERROR(EmptyDocument);
MICROGRAPH_DEFINE_ERROR(UnknownNode);
MICROGRAPH_DEFINE_ERROR(NoContent);
MICROGRAPH_DEFINE_ERROR(NavigationError);
MICROGRAPH_DEFINE_ERROR(ConsistencyError);
MICROGRAPH_DEFINE_ERROR(ValidationError);
MICROGRAPH_DEFINE_ERROR(IoError);
MICROGRAPH_DEFINE_ERROR(UnknownDocument);

#undef MICROGRAPH_DEFINE_ERROR

// Schema errors carry the offending field path, e.g. "doc_types" or
// "entity_dictionary[2].surface_forms".
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message)
      : Error("SchemaError", path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace micrograph
