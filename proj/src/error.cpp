// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#include "wikibench/error.hpp"

#include <array>
#include <utility>

namespace wikibench {
namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 21> kNames{{
    {ErrorCode::kUnknownCampaign, "UnknownCampaign"},
    {ErrorCode::kUnknownEntity, "UnknownEntity"},
    {ErrorCode::kUnknownUser, "UnknownUser"},
    {ErrorCode::kUnknownSection, "UnknownSection"},
    {ErrorCode::kUnknownScope, "UnknownScope"},
    {ErrorCode::kUnknownParent, "UnknownParent"},
    {ErrorCode::kUnknownDimension, "UnknownDimension"},
    {ErrorCode::kExcludedEntity, "ExcludedEntity"},
    {ErrorCode::kSchemaMismatch, "SchemaMismatch"},
    {ErrorCode::kInvalidSchema, "InvalidSchema"},
    {ErrorCode::kInvalidArgument, "InvalidArgument"},
    {ErrorCode::kRevisionConflict, "RevisionConflict"},
    {ErrorCode::kNoPrimaryYet, "NoPrimaryYet"},
    {ErrorCode::kDuplicateName, "DuplicateName"},
    {ErrorCode::kDuplicateExternalRef, "DuplicateExternalRef"},
    {ErrorCode::kAlreadyExcluded, "AlreadyExcluded"},
    {ErrorCode::kParseError, "ParseError"},
    {ErrorCode::kDegenerateLabels, "DegenerateLabels"},
    {ErrorCode::kAdapterFetchFailed, "AdapterFetchFailed"},
    {ErrorCode::kAuthRequired, "AuthRequired"},
    {ErrorCode::kStorageError, "StorageError"},
}};

}  // namespace

std::string_view to_string(ErrorCode code) noexcept {
  for (const auto& [c, name] : kNames) {
    if (c == code) return name;
  }
  return "Unknown";
}

std::optional<ErrorCode> error_code_from_string(std::string_view name) noexcept {
  for (const auto& [c, n] : kNames) {
    if (n == name) return c;
  }
  return std::nullopt;
}

}  // namespace wikibench
