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

#include "vadet/error.hpp"

namespace vadet {

SequenceGapError::SequenceGapError(std::uint64_t expected, std::uint64_t received)
    : Error(ErrorCode::kSequenceGap,
            "sequence gap: expected frame index " + std::to_string(expected) + ", got " +
                std::to_string(received)),
      expected_(expected),
      received_(received) {}

InsufficientHistoryError::InsufficientHistoryError(std::size_t requested, std::size_t available)
    : Error(ErrorCode::kInsufficientHistory,
            "insufficient history: " + std::to_string(requested) + " frames requested, " +
                std::to_string(available) + " buffered (short by " +
                std::to_string(requested - available) + ")"),
      requested_(requested),
      available_(available) {}

FormatError::FormatError(const std::string& what, std::uint64_t offset)
    : Error(ErrorCode::kFormat, what + " at byte offset " + std::to_string(offset)),
      offset_(offset) {}

SchemaError::SchemaError(const std::string& path, const std::string& what)
    : Error(ErrorCode::kSchema, "schema error at '" + path + "': " + what), path_(path) {}

}  // namespace vadet
