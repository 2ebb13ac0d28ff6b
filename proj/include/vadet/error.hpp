// Copyright 2026 The vadet Authors
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

#ifndef VADET__ERROR_HPP_
#define VADET__ERROR_HPP_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace vadet {

enum class ErrorCode {
  kDomain = 1,
  kSequenceGap,
  kInsufficientHistory,
  kFormat,
  kSchema,
  kIo,
  kInvalidArgument,
};

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::kDomain, what) {}
};

class InvalidArgumentError : public Error {
 public:
  explicit InvalidArgumentError(const std::string& what)
      : Error(ErrorCode::kInvalidArgument, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

/// A frame was pushed whose index does not directly follow the newest one.
class SequenceGapError : public Error {
 public:
  SequenceGapError(std::uint64_t expected, std::uint64_t received);
  std::uint64_t expected() const noexcept { return expected_; }
  std::uint64_t received() const noexcept { return received_; }

 private:
  std::uint64_t expected_;
  std::uint64_t received_;
};

/// More frames were requested than the buffer holds.
class InsufficientHistoryError : public Error {
 public:
  InsufficientHistoryError(std::size_t requested, std::size_t available);
  std::size_t requested() const noexcept { return requested_; }
  std::size_t available() const noexcept { return available_; }
  std::size_t shortfall() const noexcept { return requested_ - available_; }

 private:
  std::size_t requested_;
  std::size_t available_;
};

/// Malformed binary data; `offset` is the byte at which decoding failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset);
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Structured-text document violating its schema; `path` is a JSON pointer.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace vadet

#endif  // VADET__ERROR_HPP_
