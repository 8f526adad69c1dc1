// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "wikibench/types.hpp"

namespace wikibench {

/// Numeric encoding of one label: sign carries the choice (positive class
/// is negative on the axis), magnitude carries confidence.
struct EncodedLabel {
  double value = 0.0;

  friend bool operator==(const EncodedLabel&, const EncodedLabel&) = default;
};

/// Encoding scaled by two so every value is an integer in {-2,-1,1,2}.
/// Metrics use this form for exact moment arithmetic.
constexpr int encode_scaled(Choice choice, Confidence confidence) noexcept {
  const int magnitude = confidence == Confidence::kHigh ? 2 : 1;
  return choice == Choice::kPositive ? -magnitude : magnitude;
}

constexpr EncodedLabel encode(Choice choice, Confidence confidence) noexcept {
  return EncodedLabel{encode_scaled(choice, confidence) / 2.0};
}

constexpr EncodedLabel encode(const LabelValue& v) noexcept {
  return encode(v.choice, v.confidence);
}

}  // namespace wikibench
