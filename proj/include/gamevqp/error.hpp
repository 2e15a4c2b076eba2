// Copyright 2026 The GameVQP Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GAMEVQP_ERROR_HPP_
#define GAMEVQP_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace gamevqp {

enum class ErrorKind {
  kParse,
  kUnsupportedFormat,
  kDimension,
  kInsufficientFrames,
  kDegenerateInput,
  kInput,
  kSchema,
  kModelFormat,
  kJoin,
  kDegenerateSession,
  kEmptyVideo,
  kDegenerateRange,
  kIo,
};

constexpr std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::kDimension: return "DimensionError";
    case ErrorKind::kInsufficientFrames: return "InsufficientFrames";
    case ErrorKind::kDegenerateInput: return "DegenerateInput";
    case ErrorKind::kInput: return "InputError";
    case ErrorKind::kSchema: return "SchemaError";
    case ErrorKind::kModelFormat: return "ModelFormatError";
    case ErrorKind::kJoin: return "JoinError";
    case ErrorKind::kDegenerateSession: return "DegenerateSession";
    case ErrorKind::kEmptyVideo: return "EmptyVideo";
    case ErrorKind::kDegenerateRange: return "DegenerateRange";
    case ErrorKind::kIo: return "IoError";
  }
  return "Error";
}

// Errors caused by the content of user-supplied inputs. The CLI maps these to
// exit code 1; everything else is a runtime failure (exit code 2).
constexpr bool is_validation_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDegenerateInput:
    case ErrorKind::kIo:
      return false;
    default:
      return true;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <ErrorKind Kind>
class TypedError : public Error {
 public:
  explicit TypedError(const std::string& message) : Error(Kind, message) {}
};

using ParseError = TypedError<ErrorKind::kParse>;
using UnsupportedFormat = TypedError<ErrorKind::kUnsupportedFormat>;
using DimensionError = TypedError<ErrorKind::kDimension>;
using InsufficientFrames = TypedError<ErrorKind::kInsufficientFrames>;
using DegenerateInput = TypedError<ErrorKind::kDegenerateInput>;
using InputError = TypedError<ErrorKind::kInput>;
using SchemaError = TypedError<ErrorKind::kSchema>;
using ModelFormatError = TypedError<ErrorKind::kModelFormat>;
using JoinError = TypedError<ErrorKind::kJoin>;
using DegenerateSession = TypedError<ErrorKind::kDegenerateSession>;
using EmptyVideo = TypedError<ErrorKind::kEmptyVideo>;
using DegenerateRange = TypedError<ErrorKind::kDegenerateRange>;
using IoError = TypedError<ErrorKind::kIo>;

}  // namespace gamevqp

#endif  // GAMEVQP_ERROR_HPP_
