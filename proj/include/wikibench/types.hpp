// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

/// \file
/// Domain types shared by every module: schemas, labels, primary labels,
/// entities, talk threads and the living datasheet.
///
/// All types are plain values. Validation happens in the `validate_*`
/// helpers and in the services that construct them; once stored they are
/// never mutated in place except through the owning service.

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wikibench/error.hpp"

namespace wikibench {

/// Opaque string identifier, distinct per domain concept.
template <typename Tag>
class StrongId {
 public:
  StrongId() = default;
  explicit StrongId(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend auto operator<=>(const StrongId&, const StrongId&) = default;

 private:
  std::string value_;
};

using UserId = StrongId<struct UserIdTag>;
using EntityId = StrongId<struct EntityIdTag>;
using CampaignId = StrongId<struct CampaignIdTag>;
using PostId = StrongId<struct PostIdTag>;
using NotificationId = StrongId<struct NotificationIdTag>;

/// Milliseconds since the Unix epoch.
using Timestamp = std::int64_t;

enum class Choice { kPositive, kNegative };
enum class Confidence { kHigh, kLow };

std::string_view to_string(Choice c) noexcept;
std::string_view to_string(Confidence c) noexcept;
std::optional<Choice> parse_choice(std::string_view s) noexcept;
std::optional<Confidence> parse_confidence(std::string_view s) noexcept;

/// One judgment on one dimension.
struct LabelValue {
  std::string dimension;
  Choice choice = Choice::kPositive;
  Confidence confidence = Confidence::kHigh;

  friend bool operator==(const LabelValue&, const LabelValue&) = default;
};

struct TextRevision {
  std::uint64_t revision = 0;  // 1-based
  std::string text;
  UserId author;
  Timestamp at = 0;

  friend bool operator==(const TextRevision&, const TextRevision&) = default;
};

/// Append-only text history. Never empty once seeded.
struct RevisionedText {
  std::vector<TextRevision> revisions;

  const std::string& current() const;
  const TextRevision& append(std::string text, UserId author, Timestamp at);

  friend bool operator==(const RevisionedText&, const RevisionedText&) = default;
};

struct LabelDimension {
  std::string name;
  std::string positive_value;
  std::string negative_value;
  RevisionedText definition_text;

  /// Maps "damaging" style value names back to a Choice.
  std::optional<Choice> choice_for_value(std::string_view value) const;
  const std::string& value_for(Choice c) const {
    return c == Choice::kPositive ? positive_value : negative_value;
  }

  friend bool operator==(const LabelDimension&, const LabelDimension&) = default;
};

struct LabelSchema {
  std::vector<LabelDimension> dimensions;

  const LabelDimension* find(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const LabelSchema&, const LabelSchema&) = default;
};

/// Throws Error{kInvalidSchema} when the schema breaks its invariants.
void validate_schema(const LabelSchema& schema);

/// Primary label values: dimension name -> choice.
using ChoiceMap = std::map<std::string, Choice, std::less<>>;

struct IndividualLabel {
  UserId author;
  EntityId entity;
  std::vector<LabelValue> values;  // schema order
  std::optional<std::string> note;
  Timestamp created_at = 0;
  Timestamp updated_at = 0;

  ChoiceMap choices() const;

  friend bool operator==(const IndividualLabel&, const IndividualLabel&) = default;
};

/// Checks that `values` names every schema dimension exactly once and
/// returns them reordered to schema order. Throws Error{kSchemaMismatch}.
std::vector<LabelValue> normalize_values(const LabelSchema& schema,
                                         std::vector<LabelValue> values);

/// Same contract for primary-label choices.
ChoiceMap normalize_choices(const LabelSchema& schema, const ChoiceMap& values);

struct PrimaryRevision {
  std::uint64_t revision = 0;
  ChoiceMap values;
  UserId editor;
  Timestamp at = 0;
  std::optional<std::string> rationale;

  friend bool operator==(const PrimaryRevision&, const PrimaryRevision&) = default;
};

struct PrimaryLabel {
  EntityId entity;
  ChoiceMap values;
  std::uint64_t revision = 0;
  std::vector<PrimaryRevision> history;

  friend bool operator==(const PrimaryLabel&, const PrimaryLabel&) = default;
};

struct Entity {
  EntityId id;
  CampaignId campaign;
  std::string external_ref;
  std::string content_snapshot;
  UserId added_by;
  Timestamp added_at = 0;
  bool excluded = false;
  std::optional<std::string> exclusion_reason;

  friend bool operator==(const Entity&, const Entity&) = default;
};

struct Post {
  PostId id;
  UserId author;
  std::string body;
  Timestamp at = 0;
  std::optional<PostId> parent;

  friend bool operator==(const Post&, const Post&) = default;
};

struct Topic {
  std::string title;
  std::vector<Post> posts;

  friend bool operator==(const Topic&, const Topic&) = default;
};

/// Either one entity's talk page or the campaign-wide one.
struct ThreadScope {
  CampaignId campaign;
  std::optional<EntityId> entity;

  bool is_campaign() const noexcept { return !entity.has_value(); }
  friend bool operator==(const ThreadScope&, const ThreadScope&) = default;
};

struct TalkThread {
  ThreadScope scope;
  std::vector<Topic> topics;

  friend bool operator==(const TalkThread&, const TalkThread&) = default;
};

struct DatasheetSection {
  std::string name;
  RevisionedText text;

  friend bool operator==(const DatasheetSection&, const DatasheetSection&) = default;
};

struct Datasheet {
  static constexpr std::string_view kLabelDefinitions = "label definitions";
  static constexpr std::string_view kDataStatement = "data statement";
  static constexpr std::string_view kInclusionCriteria = "inclusion criteria";

  std::vector<DatasheetSection> sections;

  const DatasheetSection* find(std::string_view name) const;
  DatasheetSection* find(std::string_view name);

  friend bool operator==(const Datasheet&, const Datasheet&) = default;
};

/// Throws Error{kInvalidSchema} if a mandatory section is missing or a
/// section name repeats.
void validate_datasheet(const Datasheet& sheet);

enum class Quadrant {
  kClearCut,
  kAmbiguous,
  kGenuineDifference,
  kAgreedEdgeCase,
  kInsufficient,
};

std::string_view to_string(Quadrant q) noexcept;
std::optional<Quadrant> parse_quadrant(std::string_view s) noexcept;

struct QuadrantThresholds {
  double disagreement = 0.5;
  double low_confidence = 0.5;

  friend bool operator==(const QuadrantThresholds&, const QuadrantThresholds&) = default;
};

/// Throws Error{kInvalidArgument} unless both thresholds lie in (0, 1).
void validate_thresholds(const QuadrantThresholds& t);

struct Campaign {
  CampaignId id;
  std::string name;
  LabelSchema schema;
  Datasheet datasheet;
  QuadrantThresholds thresholds;
  UserId created_by;
  Timestamp created_at = 0;

  friend bool operator==(const Campaign&, const Campaign&) = default;
};

enum class NotificationKind { kPrimaryChanged, kMentioned };

std::string_view to_string(NotificationKind k) noexcept;

struct Notification {
  NotificationId id;
  UserId recipient;
  EntityId entity;
  NotificationKind kind = NotificationKind::kPrimaryChanged;
  ChoiceMap old_values;
  ChoiceMap new_values;
  Timestamp created_at = 0;
  bool read = false;

  friend bool operator==(const Notification&, const Notification&) = default;
};

/// The default two-dimension fixture: edit damage and user intent.
LabelSchema damage_intent_schema(const UserId& author, Timestamp at);

/// Seed datasheet with the three mandatory sections.
Datasheet default_datasheet(const UserId& author, Timestamp at);

}  // namespace wikibench

template <typename Tag>
struct std::hash<wikibench::StrongId<Tag>> {
  std::size_t operator()(const wikibench::StrongId<Tag>& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
