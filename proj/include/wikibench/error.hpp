// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wikibench {

/// Machine-readable error names shared by every module and the HTTP layer.
enum class ErrorCode {
  kUnknownCampaign,
  kUnknownEntity,
  kUnknownUser,
  kUnknownSection,
  kUnknownScope,
  kUnknownParent,
  kUnknownDimension,
  kExcludedEntity,
  kSchemaMismatch,
  kInvalidSchema,
  kInvalidArgument,
  kRevisionConflict,
  kNoPrimaryYet,
  kDuplicateName,
  kDuplicateExternalRef,
  kAlreadyExcluded,
  kParseError,
  kDegenerateLabels,
  kAdapterFetchFailed,
  kAuthRequired,
  kStorageError,
};

std::string_view to_string(ErrorCode code) noexcept;
std::optional<ErrorCode> error_code_from_string(std::string_view name) noexcept;

/// Exception carrying an ErrorCode plus the few structured payloads callers
/// need to act on (current revision on a CAS miss, existing id on a dedup
/// hit, line number on a parse failure).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  std::optional<std::uint64_t> current_revision;
  std::optional<std::string> existing_id;
  std::optional<std::size_t> line;

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace wikibench
