// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

/// \file
/// Label lifecycle.
///
/// Each member holds at most one individual label per entity. The first
/// individual label on an entity seeds its primary label; after that the
/// primary only changes through an explicit edit guarded by compare-and-set
/// on its revision number. Submissions never move the primary, even when a
/// majority disagrees with it; instead the submitter is told whether they
/// agree, so that disagreement can go to the talk page.

#include <optional>
#include <string>
#include <vector>

#include "wikibench/types.hpp"
#include "wikibench/workspace.hpp"

namespace wikibench {

enum class SubmitStatus { kRecordedAgree, kRecordedDisagreeNudge };

std::string_view to_string(SubmitStatus s) noexcept;

struct SubmitOutcome {
  SubmitStatus status = SubmitStatus::kRecordedAgree;
  EntityId entity_link;
  ChoiceMap primary_snapshot;
  std::uint64_t primary_revision = 0;
  /// This submission created the entity's primary label.
  bool initialized_primary = false;
  /// This call also created the entity (quick-label path).
  bool created_entity = false;

  friend bool operator==(const SubmitOutcome&, const SubmitOutcome&) = default;
};

void to_json(Json& j, const SubmitOutcome& o);

struct EntityView {
  Entity entity;
  std::optional<PrimaryLabel> primary;
  std::vector<IndividualLabel> labels;  // created_at ascending
  std::optional<IndividualLabel> own_label;
  std::vector<Topic> talk;
  bool has_discussion = false;
};

void to_json(Json& j, const EntityView& v);

/// Text shown before a primary edit; the client must collect an explicit
/// acknowledgement before sending the edit.
inline constexpr std::string_view kBoldEditNotice =
    "You are changing the consensus label that everyone sees. Be bold, but "
    "respect the labels others submitted and explain your change on the talk page.";

class LabelEngine {
 public:
  explicit LabelEngine(Workspace& ws);

  SubmitOutcome submit_individual_label(const UserId& user, const EntityId& entity,
                                        std::vector<LabelValue> values,
                                        std::optional<std::string> note = std::nullopt);

  /// Compare-and-set: succeeds only when `base_revision` is the current
  /// revision. Throws RevisionConflict (with current_revision) otherwise.
  PrimaryLabel edit_primary_label(const UserId& user, const EntityId& entity,
                                  ChoiceMap new_values, std::uint64_t base_revision,
                                  std::optional<std::string> rationale = std::nullopt);

  /// `viewer` may be empty for anonymous reads.
  EntityView get_entity_view(const UserId& viewer, const EntityId& entity) const;

  std::optional<PrimaryLabel> primary_label(const EntityId& entity) const;

  /// Newest first.
  std::vector<Notification> list_notifications(const UserId& user, bool unread_only = false) const;

  /// Idempotent; returns how many notifications changed state.
  std::size_t mark_notifications_read(const UserId& user, const std::vector<NotificationId>& ids);

  /// Creates the entity and records its first label in one event, so no
  /// reader ever observes the entity without that label. When the ref is
  /// already present this degrades to submit_individual_label.
  SubmitOutcome submit_to_new_entity(const CampaignId& campaign, const std::string& external_ref,
                                     std::string content_snapshot, const UserId& user,
                                     std::vector<LabelValue> values,
                                     std::optional<std::string> note = std::nullopt);

 private:
  void apply_submit(const Json& e);
  void apply_edit_primary(const Json& e);
  void apply_mark_read(const Json& e);

  Workspace& ws_;
};

}  // namespace wikibench
