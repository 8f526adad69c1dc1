// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#include "wikibench/eval_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "wikibench/csv.hpp"
#include "wikibench/metrics.hpp"

namespace wikibench::eval {

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& reason) {
  Error err(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + reason);
  err.line = line;
  throw err;
}

void add_score(PredictionSet& set, std::string ref, double score, std::size_t line) {
  if (!std::isfinite(score) || score < 0.0 || score > 1.0) {
    Error err(ErrorCode::kInvalidArgument,
              "line " + std::to_string(line) + ": score for '" + ref + "' is outside [0, 1]");
    err.line = line;
    throw err;
  }
  if (!set.scores.emplace(ref, score).second) {
    Error err(ErrorCode::kInvalidArgument,
              "line " + std::to_string(line) + ": repeated ref '" + ref + "'");
    err.line = line;
    throw err;
  }
}

std::optional<double> to_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

}  // namespace

PredictionSet parse_predictions_jsonl(std::string_view data) {
  PredictionSet set;
  bool header_seen = false;
  std::size_t line_no = 0;
  for (std::size_t pos = 0; pos < data.size();) {
    auto nl = data.find('\n', pos);
    if (nl == std::string_view::npos) nl = data.size();
    ++line_no;
    auto line = data.substr(pos, nl - pos);
    pos = nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) parse_fail(line_no, "malformed JSON record");
    if (!header_seen) {
      header_seen = true;
      if (!j.contains("model") || !j["model"].is_string()) {
        parse_fail(line_no, "header must name the model");
      }
      set.model = j["model"].get<std::string>();
      if (j.contains("dimension") && j["dimension"].is_string()) {
        set.dimension = j["dimension"].get<std::string>();
      }
      if (j.contains("positive_means") && j["positive_means"].is_string()) {
        set.positive_means = j["positive_means"].get<std::string>();
      }
      continue;
    }
    if (!j.contains("ref") || !j["ref"].is_string() || !j.contains("score") ||
        !j["score"].is_number()) {
      parse_fail(line_no, "expected {\"ref\": string, \"score\": number}");
    }
    add_score(set, j["ref"].get<std::string>(), j["score"].get<double>(), line_no);
  }
  if (!header_seen) parse_fail(1, "empty prediction file");
  return set;
}

PredictionSet parse_predictions_csv(std::string_view data, std::string model) {
  PredictionSet set;
  set.model = std::move(model);
  bool first = true;
  for (const auto& r : csv::parse(data)) {
    if (r.fields.size() == 1 && r.fields[0].empty()) continue;
    if (r.fields.size() != 2) parse_fail(r.line, "expected 2 columns");
    const auto score = to_number(r.fields[1]);
    if (first && !score) {
      first = false;
      continue;
    }
    first = false;
    if (!score) parse_fail(r.line, "score '" + r.fields[1] + "' is not a number");
    add_score(set, r.fields[0], *score, r.line);
  }
  return set;
}

PredictionSet load_predictions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kInvalidArgument, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::filesystem::path p(path);
  if (p.extension() == ".csv") return parse_predictions_csv(buf.str(), p.stem().string());
  return parse_predictions_jsonl(buf.str());
}

Comparison compare_models(const Service& service, const CampaignId& campaign_id,
                          const std::string& dimension, const std::vector<PredictionSet>& sets,
                          const CompareOptions& options) {
  const auto campaign = service.campaigns().get_campaign(campaign_id);
  const auto* dim = campaign.schema.find(dimension);
  if (!dim) fail(ErrorCode::kUnknownDimension, "unknown dimension '" + dimension + "'");
  if (sets.empty()) fail(ErrorCode::kInvalidArgument, "no prediction sets given");

  // Orient every set so that a high score means the positive value.
  std::vector<std::map<std::string, double>> oriented;
  for (const auto& s : sets) {
    if (s.dimension && *s.dimension != dimension) {
      fail(ErrorCode::kInvalidArgument,
           "predictions of '" + s.model + "' are for dimension '" + *s.dimension + "'");
    }
    bool flip = false;
    if (s.positive_means) {
      if (*s.positive_means == dim->negative_value || *s.positive_means == "negative") {
        flip = true;
      } else if (*s.positive_means != dim->positive_value && *s.positive_means != "positive") {
        fail(ErrorCode::kInvalidArgument, "positive_means '" + *s.positive_means +
                                              "' is not a value of '" + dimension + "'");
      }
    }
    auto scores = s.scores;
    if (flip) {
      for (auto& [ref, score] : scores) score = 1.0 - score;
    }
    oriented.push_back(std::move(scores));
  }

  Comparison out;
  out.dimension = dimension;
  std::set<std::string> evaluable;
  for (const auto& snap : service.campaigns().snapshot(campaign_id, /*include_excluded=*/false)) {
    if (!snap.primary) continue;
    const auto& ref = snap.entity.external_ref;
    evaluable.insert(ref);
    const bool everywhere = std::all_of(oriented.begin(), oriented.end(),
                                        [&](const auto& m) { return m.contains(ref); });
    if (!everywhere) {
      out.skipped_refs.push_back(ref);
      continue;
    }
    const auto stats = metrics::entity_stats(snap.entity.id, ref, campaign.schema, snap.labels,
                                             campaign.thresholds);
    const auto* d = stats.find(dimension);
    EntityAnnotation a;
    a.external_ref = ref;
    a.primary = snap.primary->values.at(dimension);
    a.disagreement = d->disagreement;
    a.low_conf_fraction = d->low_conf_fraction;
    a.quadrant = d->quadrant;
    for (std::size_t i = 0; i < sets.size(); ++i) a.scores[sets[i].model] = oriented[i].at(ref);
    out.entities.push_back(std::move(a));
  }
  if (out.entities.empty()) {
    fail(ErrorCode::kInvalidArgument, "no primary-labeled entity is scored by every model");
  }

  std::vector<Choice> labels;
  std::vector<double> weights;
  for (const auto& a : out.entities) {
    labels.push_back(a.primary);
    weights.push_back(1.0 - a.disagreement);
  }
  for (std::size_t i = 0; i < sets.size(); ++i) {
    EvaluationReport r;
    r.model = sets[i].model;
    r.dimension = dimension;
    r.n = out.entities.size();
    r.skipped_refs = out.skipped_refs;
    for (const auto& [ref, score] : sets[i].scores) {
      if (!evaluable.contains(ref)) r.unresolved_refs.push_back(ref);
    }
    std::vector<double> scores;
    for (const auto& a : out.entities) scores.push_back(a.scores.at(r.model));

    r.auc_defined = has_both_classes(labels);
    if (r.auc_defined) {
      r.roc_points = roc(labels, scores);
      r.auc = auc_from_points(r.roc_points);
    }
    const auto best = best_accuracy_threshold(labels, scores);
    r.best_threshold = best.threshold;
    r.best_accuracy = best.accuracy;
    r.confusion = best.confusion;
    if (options.weighted) {
      r.weighted_accuracy = eval::weighted_accuracy(labels, scores, weights, best.threshold);
    }
    for (std::size_t k = 0; k < out.entities.size(); ++k) {
      auto& q = r.quadrant_errors[std::string(to_string(out.entities[k].quadrant))];
      ++q.n;
      const bool predicted = scores[k] >= best.threshold;
      if (predicted != (labels[k] == Choice::kPositive)) ++q.errors;
    }
    for (auto& [tag, q] : r.quadrant_errors) {
      q.error_rate = static_cast<double>(q.errors) / static_cast<double>(q.n);
    }
    out.reports.push_back(std::move(r));
  }
  return out;
}

void to_json(Json& j, const RocPoint& p) {
  j = Json{{"fpr", p.fpr},
           {"tpr", p.tpr},
           {"threshold", std::isfinite(p.threshold) ? Json(p.threshold) : Json(nullptr)}};
}

void to_json(Json& j, const Confusion& c) {
  j = Json{{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

void to_json(Json& j, const QuadrantErrors& q) {
  j = Json{{"n", q.n}, {"errors", q.errors}, {"error_rate", q.error_rate}};
}

void to_json(Json& j, const EvaluationReport& r) {
  j = Json{{"model", r.model},
           {"dimension", r.dimension},
           {"n", r.n},
           {"auc_defined", r.auc_defined},
           {"auc", r.auc ? Json(*r.auc) : Json(nullptr)},
           {"roc_points", r.roc_points},
           {"best_threshold", r.best_threshold},
           {"best_accuracy", r.best_accuracy},
           {"confusion", r.confusion},
           {"weighted_accuracy", r.weighted_accuracy ? Json(*r.weighted_accuracy) : Json(nullptr)},
           {"skipped_refs", r.skipped_refs},
           {"unresolved_refs", r.unresolved_refs},
           {"quadrant_errors", r.quadrant_errors}};
}

void to_json(Json& j, const EntityAnnotation& a) {
  j = Json{{"external_ref", a.external_ref},
           {"primary", a.primary},
           {"disagreement", a.disagreement},
           {"low_conf_fraction", a.low_conf_fraction},
           {"quadrant", std::string(to_string(a.quadrant))},
           {"scores", a.scores}};
}

void to_json(Json& j, const Comparison& c) {
  j = Json{{"dimension", c.dimension},
           {"reports", c.reports},
           {"entities", c.entities},
           {"skipped_refs", c.skipped_refs}};
}

std::string text_table(const Comparison& c) {
  std::size_t width = 5;
  for (const auto& r : c.reports) width = std::max(width, r.model.size());
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(s.size(), w), ' ');
    return s;
  };
  std::string out = "dimension: " + c.dimension + "\n";
  out += pad("model", width) + "  " + pad("n", 6) + pad("auc", 8) + pad("threshold", 11) +
         pad("accuracy", 10) + pad("tp", 6) + pad("fp", 6) + pad("tn", 6) + "fn\n";
  for (const auto& r : c.reports) {
    out += pad(r.model, width) + "  " + pad(std::to_string(r.n), 6) +
           pad(r.auc ? fixed(*r.auc, 4) : "n/a", 8) + pad(fixed(r.best_threshold, 4), 11) +
           pad(fixed(r.best_accuracy, 4), 10) + pad(std::to_string(r.confusion.tp), 6) +
           pad(std::to_string(r.confusion.fp), 6) + pad(std::to_string(r.confusion.tn), 6) +
           std::to_string(r.confusion.fn) + "\n";
  }
  out += "skipped: " + std::to_string(c.skipped_refs.size()) + "\n";
  for (const auto& r : c.reports) {
    out += r.model + " errors by quadrant:";
    for (const auto& [tag, q] : r.quadrant_errors) {
      out += " " + tag + "=" + std::to_string(q.errors) + "/" + std::to_string(q.n);
    }
    out += "\n";
  }
  return out;
}

std::string roc_csv(const Comparison& c) {
  std::string out = csv::write_row({"model", "fpr", "tpr", "threshold"});
  for (const auto& r : c.reports) {
    for (const auto& p : r.roc_points) {
      out += csv::write_row({r.model, Json(p.fpr).dump(), Json(p.tpr).dump(),
                             std::isfinite(p.threshold) ? Json(p.threshold).dump() : "inf"});
    }
  }
  return out;
}

}  // namespace wikibench::eval
