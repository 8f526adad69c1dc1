// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

/// \file
/// Minimal RFC-4180 reader and writer. Records end in CRLF on output; the
/// reader accepts CRLF or LF. Quoted fields may span lines.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace wikibench::csv {

using Row = std::vector<std::string>;

struct Record {
  Row fields;
  std::size_t line = 0;  // 1-based physical line where the record starts
};

std::string quote(std::string_view field);
std::string write_row(const Row& row);

/// Throws Error{kParseError} with `line` set on an unterminated quote or
/// stray characters after a closing quote.
std::vector<Record> parse(std::string_view text);

}  // namespace wikibench::csv
