// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

/// \file
/// Model evaluation against a campaign's primary labels.
///
/// Prediction files come in two shapes:
///
///   JSONL  {"model":..., "positive_means":..., "dimension":...}
///          {"ref":..., "score":...}            one line per entity
///   CSV    ref,score                           optional header row; the
///                                              model name is the file stem
///
/// `positive_means` names the choice value that a high score indicates. When
/// it is the dimension's negative value, scores are flipped to 1 - s so that
/// every report scores the positive class.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wikibench/eval.hpp"
#include "wikibench/json.hpp"
#include "wikibench/service.hpp"

namespace wikibench::eval {

struct PredictionSet {
  std::string model;
  std::optional<std::string> dimension;
  std::optional<std::string> positive_means;
  std::map<std::string, double> scores;  // external_ref -> score
};

/// Throws ParseError (with line) on malformed input and InvalidArgument on
/// scores outside [0, 1] or repeated refs.
PredictionSet parse_predictions_jsonl(std::string_view data);
PredictionSet parse_predictions_csv(std::string_view data, std::string model);

/// Chooses the parser from the extension (".csv" or anything else for JSONL)
/// and reads the file. The CSV model name is the file stem.
PredictionSet load_predictions(const std::string& path);

struct QuadrantErrors {
  std::size_t n = 0;
  std::size_t errors = 0;
  double error_rate = 0.0;

  friend bool operator==(const QuadrantErrors&, const QuadrantErrors&) = default;
};

struct EvaluationReport {
  std::string model;
  std::string dimension;
  std::size_t n = 0;
  bool auc_defined = false;
  std::optional<double> auc;
  std::vector<RocPoint> roc_points;
  double best_threshold = 0.0;
  double best_accuracy = 0.0;
  Confusion confusion;
  /// Accuracy at best_threshold with weights 1 - disagreement; only in
  /// weighted mode.
  std::optional<double> weighted_accuracy;
  std::vector<std::string> skipped_refs;
  /// Refs in this model's file that name no evaluable entity.
  std::vector<std::string> unresolved_refs;
  /// Quadrant tag -> errors at best_threshold.
  std::map<std::string, QuadrantErrors> quadrant_errors;
};

struct EntityAnnotation {
  std::string external_ref;
  Choice primary = Choice::kNegative;
  double disagreement = 0.0;
  double low_conf_fraction = 0.0;
  Quadrant quadrant = Quadrant::kInsufficient;
  std::map<std::string, double> scores;  // model -> score, after flipping
};

struct Comparison {
  std::string dimension;
  std::vector<EvaluationReport> reports;  // input order
  std::vector<EntityAnnotation> entities; // evaluated set, campaign order
  /// Included, primary-labeled entities missing from at least one model.
  std::vector<std::string> skipped_refs;
};

struct CompareOptions {
  bool weighted = false;
};

/// Evaluates every set over the same entities: included, primary-labeled and
/// scored by all models. Throws UnknownDimension, and InvalidArgument when no
/// sets are given, a set names another dimension or an unknown
/// positive_means, or the shared entity set is empty.
Comparison compare_models(const Service& service, const CampaignId& campaign,
                          const std::string& dimension, const std::vector<PredictionSet>& sets,
                          const CompareOptions& options = {});

void to_json(Json& j, const RocPoint& p);
void to_json(Json& j, const Confusion& c);
void to_json(Json& j, const QuadrantErrors& q);
void to_json(Json& j, const EvaluationReport& r);
void to_json(Json& j, const EntityAnnotation& a);
void to_json(Json& j, const Comparison& c);

/// Fixed-width summary, one row per model.
std::string text_table(const Comparison& c);

/// model,fpr,tpr,threshold rows; the origin's threshold is "inf".
std::string roc_csv(const Comparison& c);

}  // namespace wikibench::eval
