// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#include "wikibench/types.hpp"

#include <set>

#include "wikibench/error.hpp"

namespace wikibench {

std::string_view to_string(Choice c) noexcept {
  return c == Choice::kPositive ? "positive" : "negative";
}

std::string_view to_string(Confidence c) noexcept {
  return c == Confidence::kHigh ? "high" : "low";
}

std::optional<Choice> parse_choice(std::string_view s) noexcept {
  if (s == "positive") return Choice::kPositive;
  if (s == "negative") return Choice::kNegative;
  return std::nullopt;
}

std::optional<Confidence> parse_confidence(std::string_view s) noexcept {
  if (s == "high") return Confidence::kHigh;
  if (s == "low") return Confidence::kLow;
  return std::nullopt;
}

std::string_view to_string(Quadrant q) noexcept {
  switch (q) {
    case Quadrant::kClearCut:
      return "clear_cut";
    case Quadrant::kAmbiguous:
      return "ambiguous";
    case Quadrant::kGenuineDifference:
      return "genuine_difference";
    case Quadrant::kAgreedEdgeCase:
      return "agreed_edge_case";
    case Quadrant::kInsufficient:
      return "insufficient";
  }
  return "insufficient";
}

std::optional<Quadrant> parse_quadrant(std::string_view s) noexcept {
  for (auto q : {Quadrant::kClearCut, Quadrant::kAmbiguous,
                 Quadrant::kGenuineDifference, Quadrant::kAgreedEdgeCase,
                 Quadrant::kInsufficient}) {
    if (to_string(q) == s) return q;
  }
  return std::nullopt;
}

std::string_view to_string(NotificationKind k) noexcept {
  return k == NotificationKind::kPrimaryChanged ? "primary_changed" : "mentioned";
}

const std::string& RevisionedText::current() const {
  if (revisions.empty()) fail(ErrorCode::kInvalidSchema, "revisioned text has no revisions");
  return revisions.back().text;
}

const TextRevision& RevisionedText::append(std::string text, UserId author,
                                           Timestamp at) {
  revisions.push_back(TextRevision{revisions.size() + 1, std::move(text),
                                   std::move(author), at});
  return revisions.back();
}

std::optional<Choice> LabelDimension::choice_for_value(std::string_view value) const {
  if (value == positive_value) return Choice::kPositive;
  if (value == negative_value) return Choice::kNegative;
  return std::nullopt;
}

const LabelDimension* LabelSchema::find(std::string_view name) const {
  for (const auto& d : dimensions) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

std::optional<std::size_t> LabelSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < dimensions.size(); ++i) {
    if (dimensions[i].name == name) return i;
  }
  return std::nullopt;
}

void validate_schema(const LabelSchema& schema) {
  if (schema.dimensions.empty()) {
    fail(ErrorCode::kInvalidSchema, "schema needs at least one dimension");
  }
  std::set<std::string, std::less<>> names;
  for (const auto& d : schema.dimensions) {
    if (d.name.empty()) fail(ErrorCode::kInvalidSchema, "dimension name is empty");
    if (!names.insert(d.name).second) {
      fail(ErrorCode::kInvalidSchema, "duplicate dimension name '" + d.name + "'");
    }
    if (d.positive_value.empty() || d.negative_value.empty()) {
      fail(ErrorCode::kInvalidSchema, "dimension '" + d.name + "' has an empty value name");
    }
    if (d.positive_value == d.negative_value) {
      fail(ErrorCode::kInvalidSchema,
           "dimension '" + d.name + "' uses the same value for both choices");
    }
    if (d.definition_text.revisions.empty()) {
      fail(ErrorCode::kInvalidSchema, "dimension '" + d.name + "' has no definition revision");
    }
  }
}

ChoiceMap IndividualLabel::choices() const {
  ChoiceMap out;
  for (const auto& v : values) out.emplace(v.dimension, v.choice);
  return out;
}

std::vector<LabelValue> normalize_values(const LabelSchema& schema,
                                         std::vector<LabelValue> values) {
  if (values.size() != schema.dimensions.size()) {
    fail(ErrorCode::kSchemaMismatch,
         "expected " + std::to_string(schema.dimensions.size()) + " label values, got " +
             std::to_string(values.size()));
  }
  std::vector<LabelValue> ordered(schema.dimensions.size());
  std::vector<bool> seen(schema.dimensions.size(), false);
  for (auto& v : values) {
    auto idx = schema.index_of(v.dimension);
    if (!idx) fail(ErrorCode::kSchemaMismatch, "unknown dimension '" + v.dimension + "'");
    if (seen[*idx]) fail(ErrorCode::kSchemaMismatch, "dimension '" + v.dimension + "' repeated");
    seen[*idx] = true;
    ordered[*idx] = std::move(v);
  }
  return ordered;
}

ChoiceMap normalize_choices(const LabelSchema& schema, const ChoiceMap& values) {
  if (values.size() != schema.dimensions.size()) {
    fail(ErrorCode::kSchemaMismatch,
         "expected " + std::to_string(schema.dimensions.size()) + " choices, got " +
             std::to_string(values.size()));
  }
  for (const auto& [dim, choice] : values) {
    if (!schema.find(dim)) fail(ErrorCode::kSchemaMismatch, "unknown dimension '" + dim + "'");
  }
  return values;
}

const DatasheetSection* Datasheet::find(std::string_view name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

DatasheetSection* Datasheet::find(std::string_view name) {
  for (auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

void validate_datasheet(const Datasheet& sheet) {
  std::set<std::string, std::less<>> names;
  for (const auto& s : sheet.sections) {
    if (s.name.empty()) fail(ErrorCode::kInvalidSchema, "datasheet section name is empty");
    if (!names.insert(s.name).second) {
      fail(ErrorCode::kInvalidSchema, "duplicate datasheet section '" + s.name + "'");
    }
    if (s.text.revisions.empty()) {
      fail(ErrorCode::kInvalidSchema, "datasheet section '" + s.name + "' has no revision");
    }
  }
  for (auto required : {Datasheet::kLabelDefinitions, Datasheet::kDataStatement,
                        Datasheet::kInclusionCriteria}) {
    if (!names.contains(required)) {
      fail(ErrorCode::kInvalidSchema,
           "datasheet is missing mandatory section '" + std::string(required) + "'");
    }
  }
}

void validate_thresholds(const QuadrantThresholds& t) {
  auto open_unit = [](double x) { return x > 0.0 && x < 1.0; };
  if (!open_unit(t.disagreement) || !open_unit(t.low_confidence)) {
    fail(ErrorCode::kInvalidArgument, "quadrant thresholds must lie in (0, 1)");
  }
}

LabelSchema damage_intent_schema(const UserId& author, Timestamp at) {
  LabelSchema schema;
  LabelDimension damage{"damage", "damaging", "not damaging", {}};
  damage.definition_text.append("Whether the edit harms the article.", author, at);
  LabelDimension intent{"intent", "bad faith", "good faith", {}};
  intent.definition_text.append("Whether the edit was saved in good or bad faith.", author, at);
  schema.dimensions = {std::move(damage), std::move(intent)};
  return schema;
}

Datasheet default_datasheet(const UserId& author, Timestamp at) {
  Datasheet sheet;
  auto add = [&](std::string_view name, std::string text) {
    DatasheetSection s{std::string(name), {}};
    s.text.append(std::move(text), author, at);
    sheet.sections.push_back(std::move(s));
  };
  add(Datasheet::kLabelDefinitions,
      "damage: whether the edit harms the article.\n"
      "intent: whether the edit was saved in good or bad faith.");
  add(Datasheet::kDataStatement, "Not yet written.");
  add(Datasheet::kInclusionCriteria, "Edits selected by campaign members.");
  return sheet;
}

}  // namespace wikibench
