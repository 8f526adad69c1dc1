// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <mutex>
#include <vector>

#include "wikibench/json.hpp"

namespace wikibench::store {

/// Append-only log of JSON records, one per line.
///
/// A record is committed once `append` returns. On open, a torn final line
/// (crash mid-write) is discarded and the file truncated to the last
/// complete record; corruption anywhere else is a StorageError.
class WriteAheadLog {
 public:
  WriteAheadLog(std::filesystem::path path, bool fsync);
  ~WriteAheadLog();

  WriteAheadLog(const WriteAheadLog&) = delete;
  WriteAheadLog& operator=(const WriteAheadLog&) = delete;

  /// Committed records in append order.
  std::vector<Json> recover();

  void append(const Json& record);

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  bool fsync_;
  int fd_ = -1;
  std::mutex mu_;
};

}  // namespace wikibench::store
