// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <mutex>

#include "wikibench/types.hpp"

namespace wikibench {

/// Source of timestamps. Successive calls return strictly increasing values
/// so that event order is recoverable from timestamps alone.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() override {
    const auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::system_clock::now().time_since_epoch())
                          .count();
    std::lock_guard lock(mu_);
    last_ = wall > last_ ? wall : last_ + 1;
    return last_;
  }

 private:
  std::mutex mu_;
  Timestamp last_ = 0;
};

/// Deterministic clock for tests: starts at `start` and ticks one
/// millisecond per call.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(Timestamp start = 1'700'000'000'000) : next_(start) {}
  Timestamp now() override { return next_.fetch_add(1); }
  void advance(Timestamp ms) { next_.fetch_add(ms); }

 private:
  std::atomic<Timestamp> next_;
};

}  // namespace wikibench
