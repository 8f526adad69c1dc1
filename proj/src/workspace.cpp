// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#include "wikibench/workspace.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace wikibench {

namespace {

std::string to_hex(const unsigned char* data, std::size_t n) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(kDigits[data[i] >> 4]);
    out.push_back(kDigits[data[i] & 0xf]);
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::kStorageError, "SHA-256 failed");
  }
  return to_hex(digest, len);
}

std::string random_token() {
  unsigned char bytes[32];
  if (RAND_bytes(bytes, sizeof bytes) != 1) fail(ErrorCode::kStorageError, "no entropy");
  return to_hex(bytes, sizeof bytes);
}

const IndividualLabel* EntityState::label_of(const UserId& user) const {
  for (const auto& l : labels) {
    if (l.author == user) return &l;
  }
  return nullptr;
}

void Inbox::deliver(Notification n) {
  std::lock_guard lock(mu_);
  boxes_[n.recipient].push_back(std::move(n));
}

std::vector<Notification> Inbox::list(const UserId& user, bool unread_only) const {
  std::lock_guard lock(mu_);
  std::vector<Notification> out;
  auto it = boxes_.find(user);
  if (it == boxes_.end()) return out;
  for (auto n = it->second.rbegin(); n != it->second.rend(); ++n) {
    if (!unread_only || !n->read) out.push_back(*n);
  }
  return out;
}

std::vector<NotificationId> Inbox::mark_read(const UserId& user,
                                             const std::vector<NotificationId>& ids) {
  std::lock_guard lock(mu_);
  std::vector<NotificationId> changed;
  auto it = boxes_.find(user);
  if (it == boxes_.end()) return changed;
  for (auto& n : it->second) {
    if (!n.read && std::find(ids.begin(), ids.end(), n.id) != ids.end()) {
      n.read = true;
      changed.push_back(n.id);
    }
  }
  return changed;
}

std::size_t Inbox::unread_count(const UserId& user) const {
  std::lock_guard lock(mu_);
  auto it = boxes_.find(user);
  if (it == boxes_.end()) return 0;
  return static_cast<std::size_t>(
      std::count_if(it->second.begin(), it->second.end(), [](const auto& n) { return !n.read; }));
}

Workspace::Workspace(Options options) : clock_(std::move(options.clock)) {
  if (!clock_) clock_ = std::make_shared<SystemClock>();
  if (options.log_path) {
    log_ = std::make_unique<store::WriteAheadLog>(*options.log_path, options.fsync);
  }
  register_applier("register_user", [this](const Json& e) { apply_register_user(e); });
  register_applier("batch", [this](const Json& e) {
    for (const auto& sub : e.at("events")) apply(sub);
  });
}

void Workspace::register_applier(std::string op, Applier applier) {
  appliers_[std::move(op)] = std::move(applier);
}

void Workspace::recover() {
  if (!log_) return;
  for (const auto& event : log_->recover()) apply(event);
}

void Workspace::commit(const Json& event) {
  if (log_) log_->append(event);
  apply(event);
}

void Workspace::apply(const Json& event) {
  const auto op = event.at("op").get<std::string>();
  auto it = appliers_.find(op);
  if (it == appliers_.end()) fail(ErrorCode::kStorageError, "no applier for event '" + op + "'");
  it->second(event);
}

std::string Workspace::allocate_id(char prefix) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%08llu", prefix,
                static_cast<unsigned long long>(next_serial_.fetch_add(1)));
  return buf;
}

void Workspace::observe_id(std::string_view id) {
  if (id.size() < 2) return;
  std::uint64_t n = 0;
  auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), n);
  if (ec != std::errc{} || ptr != id.data() + id.size()) return;
  auto cur = next_serial_.load();
  while (cur <= n && !next_serial_.compare_exchange_weak(cur, n + 1)) {
  }
}

CampaignState* Workspace::find_campaign(const CampaignId& id) {
  auto it = campaigns_.find(id);
  return it == campaigns_.end() ? nullptr : it->second.get();
}

CampaignState* Workspace::find_campaign_by_name(std::string_view name) {
  for (auto& [id, c] : campaigns_) {
    if (c->campaign.name == name) return c.get();
  }
  return nullptr;
}

EntityState* Workspace::find_entity(const EntityId& id) {
  auto it = entities_.find(id);
  return it == entities_.end() ? nullptr : it->second.get();
}

const UserRecord* Workspace::find_user(const UserId& id) const {
  auto it = users_.find(id);
  return it == users_.end() ? nullptr : &it->second;
}

const UserRecord* Workspace::find_user_by_token_hash(std::string_view hash) const {
  auto it = token_index_.find(std::string(hash));
  return it == token_index_.end() ? nullptr : find_user(it->second);
}

std::vector<CampaignId> Workspace::campaign_ids() const {
  std::vector<CampaignId> out;
  for (const auto& [id, c] : campaigns_) out.push_back(id);
  return out;
}

CampaignState& Workspace::insert_campaign(Campaign campaign) {
  observe_id(campaign.id.str());
  auto state = std::make_unique<CampaignState>();
  state->campaign = std::move(campaign);
  auto& ref = *state;
  campaigns_[ref.campaign.id] = std::move(state);
  return ref;
}

EntityState& Workspace::insert_entity(Entity entity) {
  observe_id(entity.id.str());
  auto state = std::make_unique<EntityState>();
  state->last_activity = entity.added_at;
  state->entity = std::move(entity);
  auto& ref = *state;
  entities_[ref.entity.id] = std::move(state);
  return ref;
}

void Workspace::insert_user(UserRecord user) {
  auto& slot = users_[user.id];
  if (!slot.token_hash.empty()) token_index_.erase(slot.token_hash);
  if (!user.token_hash.empty()) token_index_[user.token_hash] = user.id;
  slot = std::move(user);
}

std::string Workspace::register_user(const UserId& id, std::string display_name, bool imported) {
  if (id.empty()) fail(ErrorCode::kInvalidArgument, "user id is empty");
  auto token = random_token();
  std::unique_lock lock(registry_mu_);
  if (display_name.empty()) {
    const auto* existing = find_user(id);
    display_name = existing ? existing->display_name : id.str();
  }
  commit(Json{{"op", "register_user"},
              {"user", id},
              {"display_name", display_name},
              {"token_hash", sha256_hex(token)},
              {"imported", imported},
              {"at", clock_->now()}});
  return token;
}

void Workspace::ensure_user(const UserId& id, bool imported) {
  if (find_user(id)) return;
  commit(Json{{"op", "register_user"},
              {"user", id},
              {"display_name", id.str()},
              {"token_hash", ""},
              {"imported", imported},
              {"at", clock_->now()}});
}

std::optional<UserId> Workspace::authenticate(std::string_view token) {
  if (token.empty()) return std::nullopt;
  const auto hash = sha256_hex(token);
  std::shared_lock lock(registry_mu_);
  const auto* user = find_user_by_token_hash(hash);
  if (!user) return std::nullopt;
  return user->id;
}

std::vector<UserRecord> Workspace::users() const {
  std::shared_lock lock(registry_mu_);
  std::vector<UserRecord> out;
  for (const auto& [id, u] : users_) out.push_back(u);
  return out;
}

void Workspace::apply_register_user(const Json& e) {
  UserRecord user;
  user.id = e.at("user").get<UserId>();
  user.display_name = e.at("display_name").get<std::string>();
  user.token_hash = e.at("token_hash").get<std::string>();
  user.imported = e.value("imported", false);
  user.created_at = e.at("at").get<Timestamp>();
  if (const auto* existing = find_user(user.id)) {
    user.created_at = existing->created_at;
    user.imported = existing->imported && user.imported;
  }
  insert_user(std::move(user));
}

}  // namespace wikibench
