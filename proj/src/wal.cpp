// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#include "wikibench/wal.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace wikibench::store {
namespace {

[[noreturn]] void storage_fail(const std::string& what) {
  fail(ErrorCode::kStorageError, what + ": " + std::strerror(errno));
}

}  // namespace

WriteAheadLog::WriteAheadLog(std::filesystem::path path, bool fsync)
    : path_(std::move(path)), fsync_(fsync) {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) storage_fail("cannot open log " + path_.string());
}

WriteAheadLog::~WriteAheadLog() {
  if (fd_ >= 0) ::close(fd_);
}

std::vector<Json> WriteAheadLog::recover() {
  std::lock_guard lock(mu_);
  std::ifstream in(path_, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string data = buffer.str();

  std::vector<Json> records;
  std::size_t committed_end = 0;
  std::size_t line_no = 0;
  for (std::size_t pos = 0; pos < data.size();) {
    const auto nl = data.find('\n', pos);
    ++line_no;
    if (nl == std::string::npos) break;  // torn tail
    const std::string_view line(data.data() + pos, nl - pos);
    auto parsed = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) {
      Error err(ErrorCode::kStorageError,
                "corrupt log record at line " + std::to_string(line_no) + " of " + path_.string());
      err.line = line_no;
      throw err;
    }
    records.push_back(std::move(parsed));
    pos = nl + 1;
    committed_end = pos;
  }
  if (committed_end < data.size()) {
    if (::ftruncate(fd_, static_cast<off_t>(committed_end)) != 0) {
      storage_fail("cannot truncate torn log tail");
    }
  }
  return records;
}

void WriteAheadLog::append(const Json& record) {
  std::string line = record.dump();
  line.push_back('\n');
  std::lock_guard lock(mu_);
  const char* p = line.data();
  std::size_t left = line.size();
  while (left > 0) {
    const auto n = ::write(fd_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      storage_fail("log write failed");
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (fsync_ && ::fdatasync(fd_) != 0) storage_fail("log sync failed");
}

}  // namespace wikibench::store
