// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

/// \file
/// Per-entity agreement statistics.
///
/// Disagreement is the population standard deviation of encoded labels on
/// one dimension; it lies in [0, 1]. Confidence is tracked separately as
/// the fraction of labels flagged low confidence. Together they place an
/// entity in one of four quadrants.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ranges>
#include <string>
#include <vector>

#include "wikibench/encoding.hpp"
#include "wikibench/types.hpp"

namespace wikibench::metrics {

template <typename R>
concept LabelValueRange =
    std::ranges::input_range<R> &&
    std::convertible_to<std::ranges::range_reference_t<R>, const LabelValue&>;

/// Population standard deviation of encode(v) over `labels`; 0 for fewer
/// than two labels.
///
/// Computed from integer moments of the doubled encoding, so the result is
/// independent of label order and equal multisets give bit-identical values.
template <LabelValueRange R>
double disagreement(R&& labels) {
  std::int64_t n = 0;
  std::int64_t sum = 0;
  std::int64_t sum_sq = 0;
  for (const LabelValue& v : labels) {
    const std::int64_t x = encode_scaled(v.choice, v.confidence);
    ++n;
    sum += x;
    sum_sq += x * x;
  }
  if (n <= 1) return 0.0;
  // var(x/2) = (n*sum_sq - sum^2) / (4 n^2)
  const std::int64_t numerator = n * sum_sq - sum * sum;
  const double variance = static_cast<double>(numerator) / static_cast<double>(4 * n * n);
  return std::sqrt(variance);
}

/// count(low) / n, 0 for an empty range.
template <LabelValueRange R>
double low_conf_fraction(R&& labels) {
  std::size_t n = 0;
  std::size_t low = 0;
  for (const LabelValue& v : labels) {
    ++n;
    if (v.confidence == Confidence::kLow) ++low;
  }
  return n == 0 ? 0.0 : static_cast<double>(low) / static_cast<double>(n);
}

/// 2x2 placement; values equal to a threshold count as high.
constexpr Quadrant quadrant(double disagreement, double low_conf_fraction,
                            const QuadrantThresholds& t = {}) noexcept {
  const bool high_disagreement = disagreement >= t.disagreement;
  const bool low_confidence = low_conf_fraction >= t.low_confidence;
  if (high_disagreement) {
    return low_confidence ? Quadrant::kAmbiguous : Quadrant::kGenuineDifference;
  }
  return low_confidence ? Quadrant::kAgreedEdgeCase : Quadrant::kClearCut;
}

struct DimensionStats {
  std::string dimension;
  double disagreement = 0.0;
  double low_conf_fraction = 0.0;
  Quadrant quadrant = Quadrant::kInsufficient;

  friend bool operator==(const DimensionStats&, const DimensionStats&) = default;
};

struct EntityStats {
  EntityId entity;
  std::string external_ref;
  std::size_t n_labels = 0;
  std::vector<DimensionStats> dimensions;  // schema order

  const DimensionStats* find(std::string_view dim) const {
    for (const auto& d : dimensions) {
      if (d.dimension == dim) return &d;
    }
    return nullptr;
  }
  double max_disagreement() const {
    double m = 0.0;
    for (const auto& d : dimensions) m = std::max(m, d.disagreement);
    return m;
  }

  friend bool operator==(const EntityStats&, const EntityStats&) = default;
};

/// Stats for one entity from its individual labels.
EntityStats entity_stats(const EntityId& entity, std::string external_ref,
                         const LabelSchema& schema,
                         const std::vector<IndividualLabel>& labels,
                         const QuadrantThresholds& thresholds);

struct ChoiceComposition {
  std::string dimension;
  std::size_t positive = 0;
  std::size_t negative = 0;
  double positive_fraction = 0.0;
  double negative_fraction = 0.0;

  friend bool operator==(const ChoiceComposition&, const ChoiceComposition&) = default;
};

struct CampaignStats {
  std::vector<EntityStats> entities;  // included entities, campaign order
  std::size_t n_entities = 0;
  std::size_t n_labeled = 0;
  std::size_t n_labels = 0;
  std::vector<ChoiceComposition> primary_composition;  // schema order
  std::map<std::string, std::size_t> labels_per_user;
  std::map<std::string, std::map<std::string, std::size_t>> quadrant_counts;  // dim -> tag -> n

  friend bool operator==(const CampaignStats&, const CampaignStats&) = default;
};

/// Copy of one entity's state taken under its lock.
struct EntitySnapshot {
  Entity entity;
  std::vector<IndividualLabel> labels;
  std::optional<PrimaryLabel> primary;
  bool has_discussion = false;
  Timestamp last_activity = 0;
};

/// Builds composition and contribution aggregates from per-entity inputs.
/// Excluded entities are skipped.
CampaignStats campaign_stats(const Campaign& campaign,
                             const std::vector<EntitySnapshot>& entities);

}  // namespace wikibench::metrics
