// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

/// \file
/// Binary-classifier evaluation against curated labels: ROC curve,
/// trapezoidal AUC, accuracy-maximizing threshold and confusion counts.
///
/// Labels use Choice; kPositive is the class the scores estimate.
/// A sample is predicted positive when `score >= threshold`.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "wikibench/error.hpp"
#include "wikibench/types.hpp"

namespace wikibench::eval {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  /// Score at which this point is reached; +inf for the (0,0) origin.
  double threshold = 0.0;

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t correct() const noexcept { return tp + tn; }
  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct ThresholdChoice {
  double threshold = 0.0;
  double accuracy = 0.0;
  Confusion confusion;
};

namespace detail {

inline void check_inputs(std::span<const Choice> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) {
    fail(ErrorCode::kInvalidArgument, "labels and scores differ in length");
  }
  if (labels.empty()) fail(ErrorCode::kInvalidArgument, "no samples to evaluate");
  for (double s : scores) {
    if (!std::isfinite(s)) fail(ErrorCode::kInvalidArgument, "score is not finite");
  }
}

inline std::size_t count_positive(std::span<const Choice> labels) {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Choice::kPositive));
}

inline void require_both_classes(std::size_t positives, std::size_t total) {
  if (positives == 0 || positives == total) {
    fail(ErrorCode::kDegenerateLabels, "ROC needs at least one positive and one negative label");
  }
}

}  // namespace detail

/// True when both classes are present, i.e. roc/auc are defined.
inline bool has_both_classes(std::span<const Choice> labels) {
  const auto p = detail::count_positive(labels);
  return p != 0 && p != labels.size();
}

/// One point per distinct score, thresholds descending, preceded by the
/// origin. Equal scores are grouped into a single step.
inline std::vector<RocPoint> roc(std::span<const Choice> labels, std::span<const double> scores) {
  detail::check_inputs(labels, scores);
  const std::size_t n = labels.size();
  const std::size_t positives = detail::count_positive(labels);
  detail::require_both_classes(positives, n);
  const std::size_t negatives = n - positives;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> points;
  points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < n;) {
    const double threshold = scores[order[i]];
    for (; i < n && scores[order[i]] == threshold; ++i) {
      if (labels[order[i]] == Choice::kPositive) {
        ++tp;
      } else {
        ++fp;
      }
    }
    points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                      static_cast<double>(tp) / static_cast<double>(positives), threshold});
  }
  return points;
}

/// Trapezoidal area under a ROC polyline.
inline double auc_from_points(std::span<const RocPoint> points) {
  double area = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    area += (points[i].fpr - points[i - 1].fpr) * (points[i].tpr + points[i - 1].tpr) / 2.0;
  }
  return area;
}

inline double auc(std::span<const Choice> labels, std::span<const double> scores) {
  const auto points = roc(labels, scores);
  return auc_from_points(points);
}

inline Confusion confusion_at(std::span<const Choice> labels, std::span<const double> scores,
                              double threshold) {
  detail::check_inputs(labels, scores);
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    const bool actual = labels[i] == Choice::kPositive;
    if (predicted && actual) {
      ++c.tp;
    } else if (predicted) {
      ++c.fp;
    } else if (actual) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

/// Midpoint strictly above `lo` and at most `hi` for distinct lo < hi.
inline double midpoint_above(double lo, double hi) {
  const double m = lo + (hi - lo) / 2.0;
  return m > lo ? m : hi;
}

/// Accuracy-maximizing threshold over {0, 1} and the midpoints of adjacent
/// distinct scores. Ties resolve to the smallest threshold. Scores must lie
/// in [0, 1]; a single class is allowed.
inline ThresholdChoice best_accuracy_threshold(std::span<const Choice> labels,
                                               std::span<const double> scores) {
  detail::check_inputs(labels, scores);
  for (double s : scores) {
    if (s < 0.0 || s > 1.0) fail(ErrorCode::kInvalidArgument, "score outside [0, 1]");
  }
  const std::size_t n = labels.size();

  // Sweep candidates ascending; the sample set predicted positive shrinks
  // one distinct-score group at a time.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  std::vector<double> candidates{0.0};
  for (std::size_t i = 1; i < n; ++i) {
    const double lo = scores[order[i - 1]];
    const double hi = scores[order[i]];
    if (hi > lo) candidates.push_back(midpoint_above(lo, hi));
  }
  candidates.push_back(1.0);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  // At threshold t: tp = positives with s >= t, tn = negatives with s < t.
  const std::size_t positives = detail::count_positive(labels);
  std::size_t below_pos = 0;  // positives with s < t
  std::size_t below_neg = 0;  // negatives with s < t
  std::size_t cursor = 0;
  ThresholdChoice best;
  std::size_t best_correct = 0;
  bool first = true;
  for (double t : candidates) {
    for (; cursor < n && scores[order[cursor]] < t; ++cursor) {
      if (labels[order[cursor]] == Choice::kPositive) {
        ++below_pos;
      } else {
        ++below_neg;
      }
    }
    const std::size_t correct = (positives - below_pos) + below_neg;
    if (first || correct > best_correct) {
      first = false;
      best_correct = correct;
      best.threshold = t;
    }
  }
  best.confusion = confusion_at(labels, scores, best.threshold);
  best.accuracy = static_cast<double>(best_correct) / static_cast<double>(n);
  return best;
}

/// Accuracy where each sample counts with its weight; 0 when all weights are 0.
inline double weighted_accuracy(std::span<const Choice> labels, std::span<const double> scores,
                                std::span<const double> weights, double threshold) {
  detail::check_inputs(labels, scores);
  if (weights.size() != labels.size()) {
    fail(ErrorCode::kInvalidArgument, "weights and labels differ in length");
  }
  double hit = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    const bool actual = labels[i] == Choice::kPositive;
    total += weights[i];
    if (predicted == actual) hit += weights[i];
  }
  return total > 0.0 ? hit / total : 0.0;
}

}  // namespace wikibench::eval
