// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

/// \file
/// Campaign lifecycle: creation, entity intake, the sortable dataset table,
/// soft exclusion, the living datasheet and talk threads.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wikibench/metrics.hpp"
#include "wikibench/types.hpp"
#include "wikibench/workspace.hpp"

namespace wikibench {

enum class SortMode {
  kFewestLabels,
  kHighestDisagreement,
  kDiffersFromMine,
  kRecentActivity,
};

std::string_view to_string(SortMode m) noexcept;
std::optional<SortMode> parse_sort_mode(std::string_view s) noexcept;

struct TableRow {
  EntityId entity;
  std::string external_ref;
  ChoiceMap primary;
  std::size_t n_labels = 0;
  double disagreement = 0.0;  // max over dimensions
  bool has_discussion = false;
  bool differs_from_viewer = false;
  Timestamp last_activity = 0;

  friend bool operator==(const TableRow&, const TableRow&) = default;
};

void to_json(Json& j, const TableRow& row);

enum class ExcludeResult { kExcluded, kAlreadyExcluded };

inline constexpr std::size_t kDefaultPageSize = 50;
inline constexpr std::size_t kMaxPageSize = 1000;

/// Builds the event that adds an entity; shared with the atomic
/// create-and-label path.
Json make_add_entity_event(const EntityId& id, const CampaignId& campaign,
                           std::string external_ref, std::string content_snapshot,
                           const UserId& user, Timestamp at);

/// Table row for one entity snapshot as seen by `viewer`.
TableRow make_table_row(const metrics::EntitySnapshot& snap, const LabelSchema& schema,
                        const UserId& viewer);

/// Orders rows in place for `mode`; ties break on entity id ascending.
void sort_rows(std::vector<TableRow>& rows, SortMode mode);

class CampaignService {
 public:
  explicit CampaignService(Workspace& ws);

  CampaignId create_campaign(const UserId& creator, std::string name, LabelSchema schema,
                             Datasheet seed_datasheet, QuadrantThresholds thresholds = {});

  Campaign get_campaign(const CampaignId& id) const;
  std::vector<Campaign> list_campaigns() const;
  std::optional<CampaignId> find_campaign_by_name(std::string_view name) const;

  void set_thresholds(const CampaignId& id, const QuadrantThresholds& thresholds,
                      const UserId& user);

  /// Throws DuplicateExternalRef with `existing_id` set when the ref is taken,
  /// excluded entities included.
  EntityId add_entity(const CampaignId& campaign, std::string external_ref,
                      std::string content_snapshot, const UserId& user);

  std::optional<EntityId> find_entity_by_ref(const CampaignId& campaign,
                                             std::string_view external_ref) const;

  /// Included entities only. `page` is 0-based.
  std::vector<TableRow> list_table(const CampaignId& campaign, const UserId& viewer,
                                   SortMode sort, std::size_t page = 0,
                                   std::size_t page_size = kDefaultPageSize) const;

  ExcludeResult exclude_entity(const CampaignId& campaign, const EntityId& entity,
                               const UserId& user, std::string reason);

  TextRevision edit_datasheet_section(const CampaignId& campaign, std::string_view section,
                                      std::string new_text, const UserId& user);
  TextRevision add_datasheet_section(const CampaignId& campaign, std::string section,
                                     std::string text, const UserId& user);
  RevisionedText datasheet_history(const CampaignId& campaign, std::string_view section) const;

  TextRevision edit_dimension_definition(const CampaignId& campaign, std::string_view dimension,
                                         std::string new_text, const UserId& user);

  /// Appends a post, creating the topic when the title is new. Replies to a
  /// reply attach to its top-level post. "@user" mentions notify that user.
  PostId post_to_thread(const ThreadScope& scope, std::string topic_title, std::string body,
                        const UserId& user, std::optional<PostId> parent = std::nullopt);

  std::vector<Topic> thread(const ThreadScope& scope) const;

  /// Consistent snapshot of every entity in campaign order.
  std::vector<metrics::EntitySnapshot> snapshot(const CampaignId& campaign,
                                                bool include_excluded) const;

  metrics::CampaignStats campaign_stats(const CampaignId& campaign) const;

 private:
  void apply_create_campaign(const Json& e);
  void apply_set_thresholds(const Json& e);
  void apply_add_entity(const Json& e);
  void apply_exclude(const Json& e);
  void apply_edit_section(const Json& e);
  void apply_add_section(const Json& e);
  void apply_edit_definition(const Json& e);
  void apply_post(const Json& e);

  Workspace& ws_;
};

}  // namespace wikibench
