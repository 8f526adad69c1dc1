// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

/// \file
/// In-memory state shared by the label engine, campaign service and store,
/// plus the event log that makes it durable.
///
/// Every mutation is an event (a JSON object with an "op" field). A service
/// validates under the appropriate locks, then calls `commit`, which appends
/// the event to the log and applies it through the registered applier.
/// Recovery replays the log through the same appliers, so replay and live
/// application cannot drift apart.
///
/// Lock order: registry -> campaign -> entity -> inbox. Appliers run with the
/// caller's locks held and never lock anything themselves.

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "wikibench/clock.hpp"
#include "wikibench/json.hpp"
#include "wikibench/types.hpp"
#include "wikibench/wal.hpp"

namespace wikibench {

struct UserRecord {
  UserId id;
  std::string display_name;
  std::string token_hash;  // hex SHA-256 of the bearer token
  bool imported = false;   // created by dataset import; exported verbatim
  Timestamp created_at = 0;
};

struct EntityState {
  mutable std::mutex mu;
  Entity entity;
  std::vector<IndividualLabel> labels;  // first-submission order
  std::optional<PrimaryLabel> primary;
  std::vector<Topic> talk;
  Timestamp last_activity = 0;

  const IndividualLabel* label_of(const UserId& user) const;
};

struct CampaignState {
  mutable std::mutex mu;  // datasheet, schema definitions, talk
  Campaign campaign;
  std::vector<Topic> talk;
  // Guarded by the registry lock.
  std::vector<EntityId> entities;
  std::map<std::string, EntityId, std::less<>> by_ref;
};

/// Per-user notification lists, newest last.
class Inbox {
 public:
  void deliver(Notification n);
  std::vector<Notification> list(const UserId& user, bool unread_only) const;
  /// Marks ids read for `user`; returns ids that changed.
  std::vector<NotificationId> mark_read(const UserId& user, const std::vector<NotificationId>& ids);
  std::size_t unread_count(const UserId& user) const;

 private:
  mutable std::mutex mu_;
  std::unordered_map<UserId, std::vector<Notification>> boxes_;
};

class Workspace {
 public:
  struct Options {
    /// No path keeps everything in memory.
    std::optional<std::filesystem::path> log_path;
    bool fsync = true;
    std::shared_ptr<Clock> clock;
  };

  using Applier = std::function<void(const Json& event)>;

  explicit Workspace(Options options);

  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  void register_applier(std::string op, Applier applier);

  /// Replays the log. Call once, after all appliers are registered.
  void recover();

  /// Logs then applies `event`. The caller holds every lock its applier needs.
  void commit(const Json& event);

  /// Applies without logging; used by replay and batch expansion.
  void apply(const Json& event);

  Clock& clock() noexcept { return *clock_; }
  bool persistent() const noexcept { return log_ != nullptr; }

  /// Allocates an id such as "e00000042"; ids sort in allocation order.
  std::string allocate_id(char prefix);
  /// Keeps the allocator ahead of ids seen during replay.
  void observe_id(std::string_view id);

  std::shared_mutex& registry_mutex() noexcept { return registry_mu_; }

  // The following lookups require the registry lock (shared or unique).
  CampaignState* find_campaign(const CampaignId& id);
  CampaignState* find_campaign_by_name(std::string_view name);
  EntityState* find_entity(const EntityId& id);
  const UserRecord* find_user(const UserId& id) const;
  const UserRecord* find_user_by_token_hash(std::string_view hash) const;
  std::vector<CampaignId> campaign_ids() const;

  // The following require the registry lock held unique.
  CampaignState& insert_campaign(Campaign campaign);
  EntityState& insert_entity(Entity entity);
  void insert_user(UserRecord user);

  Inbox& inbox() noexcept { return inbox_; }

  /// Adds a member and returns a fresh bearer token. Re-registering an
  /// existing id rotates its token and keeps the display name unless a new
  /// one is given.
  std::string register_user(const UserId& id, std::string display_name, bool imported = false);
  /// Registers `id` without a usable token if it is unknown. Used by import;
  /// the caller holds the registry lock unique.
  void ensure_user(const UserId& id, bool imported);
  std::optional<UserId> authenticate(std::string_view token);
  std::vector<UserRecord> users() const;

 private:
  void apply_register_user(const Json& event);

  std::shared_ptr<Clock> clock_;
  std::unique_ptr<store::WriteAheadLog> log_;
  std::map<std::string, Applier, std::less<>> appliers_;
  std::atomic<std::uint64_t> next_serial_{1};

  mutable std::shared_mutex registry_mu_;
  std::map<CampaignId, std::unique_ptr<CampaignState>> campaigns_;
  std::unordered_map<EntityId, std::unique_ptr<EntityState>> entities_;
  std::map<UserId, UserRecord> users_;
  std::unordered_map<std::string, UserId> token_index_;

  Inbox inbox_;
};

/// Hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// Random 32-byte token, hex encoded.
std::string random_token();

}  // namespace wikibench
