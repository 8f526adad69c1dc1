// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#include "wikibench/label_engine.hpp"

#include <algorithm>
#include <set>

#include "wikibench/campaign_service.hpp"
#include "wikibench/json.hpp"

namespace wikibench {

namespace {

void require_member(const Workspace& ws, const UserId& user) {
  if (!ws.find_user(user)) fail(ErrorCode::kUnknownUser, "unknown user '" + user.str() + "'");
}

EntityState& entity_or_throw(Workspace& ws, const EntityId& id) {
  auto* e = ws.find_entity(id);
  if (!e) fail(ErrorCode::kUnknownEntity, "unknown entity '" + id.str() + "'");
  return *e;
}

LabelSchema schema_of(Workspace& ws, const CampaignId& id) {
  auto* c = ws.find_campaign(id);
  if (!c) fail(ErrorCode::kUnknownCampaign, "unknown campaign '" + id.str() + "'");
  std::lock_guard lock(c->mu);
  return c->campaign.schema;
}

ChoiceMap choices_of(const std::vector<LabelValue>& values) {
  ChoiceMap out;
  for (const auto& v : values) out.emplace(v.dimension, v.choice);
  return out;
}

Json submit_event(const EntityId& entity, const UserId& user,
                  const std::vector<LabelValue>& values, const std::optional<std::string>& note,
                  Timestamp at) {
  return Json{{"op", "submit_label"},
              {"entity", entity},
              {"author", user},
              {"values", values},
              {"note", note ? Json(*note) : Json(nullptr)},
              {"at", at}};
}

}  // namespace

std::string_view to_string(SubmitStatus s) noexcept {
  return s == SubmitStatus::kRecordedAgree ? "recorded_agree" : "recorded_disagree_nudge";
}

void to_json(Json& j, const SubmitOutcome& o) {
  j = Json{{"status", std::string(to_string(o.status))},
           {"entity_link", o.entity_link},
           {"primary_snapshot", o.primary_snapshot},
           {"primary_revision", o.primary_revision},
           {"initialized_primary", o.initialized_primary},
           {"created_entity", o.created_entity}};
}

void to_json(Json& j, const EntityView& v) {
  j = Json{{"entity", v.entity},
           {"primary", v.primary ? Json(*v.primary) : Json(nullptr)},
           {"labels", v.labels},
           {"own_label", v.own_label ? Json(*v.own_label) : Json(nullptr)},
           {"talk", v.talk},
           {"has_discussion", v.has_discussion},
           {"excluded", v.entity.excluded}};
}

LabelEngine::LabelEngine(Workspace& ws) : ws_(ws) {
  ws_.register_applier("submit_label", [this](const Json& e) { apply_submit(e); });
  ws_.register_applier("edit_primary", [this](const Json& e) { apply_edit_primary(e); });
  ws_.register_applier("mark_read", [this](const Json& e) { apply_mark_read(e); });
}

SubmitOutcome LabelEngine::submit_individual_label(const UserId& user, const EntityId& entity,
                                                   std::vector<LabelValue> values,
                                                   std::optional<std::string> note) {
  std::shared_lock lock(ws_.registry_mutex());
  require_member(ws_, user);
  auto& es = entity_or_throw(ws_, entity);
  const auto schema = schema_of(ws_, es.entity.campaign);
  values = normalize_values(schema, std::move(values));

  std::lock_guard elock(es.mu);
  if (es.entity.excluded) fail(ErrorCode::kExcludedEntity, "entity '" + entity.str() + "' is excluded");

  SubmitOutcome out;
  out.entity_link = entity;
  const auto submitted = choices_of(values);
  if (es.primary) {
    out.status = submitted == es.primary->values ? SubmitStatus::kRecordedAgree
                                                 : SubmitStatus::kRecordedDisagreeNudge;
  } else {
    out.initialized_primary = true;
  }
  ws_.commit(submit_event(entity, user, values, note, ws_.clock().now()));
  out.primary_snapshot = es.primary->values;
  out.primary_revision = es.primary->revision;
  return out;
}

PrimaryLabel LabelEngine::edit_primary_label(const UserId& user, const EntityId& entity,
                                             ChoiceMap new_values, std::uint64_t base_revision,
                                             std::optional<std::string> rationale) {
  std::shared_lock lock(ws_.registry_mutex());
  require_member(ws_, user);
  auto& es = entity_or_throw(ws_, entity);
  const auto schema = schema_of(ws_, es.entity.campaign);
  new_values = normalize_choices(schema, new_values);

  std::lock_guard elock(es.mu);
  if (!es.primary) fail(ErrorCode::kNoPrimaryYet, "entity '" + entity.str() + "' has no labels yet");
  if (es.primary->revision != base_revision) {
    Error err(ErrorCode::kRevisionConflict,
              "primary label of '" + entity.str() + "' is at revision " +
                  std::to_string(es.primary->revision) + ", not " + std::to_string(base_revision));
    err.current_revision = es.primary->revision;
    throw err;
  }

  std::set<UserId> recipients;
  for (const auto& label : es.labels) {
    if (label.author != user) recipients.insert(label.author);
  }
  Json notifications = Json::array();
  for (const auto& r : recipients) {
    notifications.push_back(Json{{"id", ws_.allocate_id('n')}, {"recipient", r}});
  }
  ws_.commit(Json{{"op", "edit_primary"},
                  {"entity", entity},
                  {"editor", user},
                  {"values", new_values},
                  {"base_revision", base_revision},
                  {"rationale", rationale ? Json(*rationale) : Json(nullptr)},
                  {"at", ws_.clock().now()},
                  {"notifications", std::move(notifications)}});
  return *es.primary;
}

EntityView LabelEngine::get_entity_view(const UserId& viewer, const EntityId& entity) const {
  std::shared_lock lock(ws_.registry_mutex());
  auto& es = entity_or_throw(ws_, entity);
  std::lock_guard elock(es.mu);
  EntityView view;
  view.entity = es.entity;
  view.primary = es.primary;
  view.labels = es.labels;
  std::stable_sort(view.labels.begin(), view.labels.end(),
                   [](const auto& a, const auto& b) { return a.created_at < b.created_at; });
  if (const auto* own = es.label_of(viewer); own && !viewer.empty()) view.own_label = *own;
  view.talk = es.talk;
  view.has_discussion = !es.talk.empty();
  return view;
}

std::optional<PrimaryLabel> LabelEngine::primary_label(const EntityId& entity) const {
  std::shared_lock lock(ws_.registry_mutex());
  auto& es = entity_or_throw(ws_, entity);
  std::lock_guard elock(es.mu);
  return es.primary;
}

std::vector<Notification> LabelEngine::list_notifications(const UserId& user,
                                                          bool unread_only) const {
  return ws_.inbox().list(user, unread_only);
}

std::size_t LabelEngine::mark_notifications_read(const UserId& user,
                                                 const std::vector<NotificationId>& ids) {
  std::shared_lock lock(ws_.registry_mutex());
  std::vector<NotificationId> pending;
  for (const auto& n : ws_.inbox().list(user, /*unread_only=*/true)) {
    if (std::find(ids.begin(), ids.end(), n.id) != ids.end()) pending.push_back(n.id);
  }
  if (pending.empty()) return 0;
  ws_.commit(Json{{"op", "mark_read"}, {"user", user}, {"ids", pending}});
  return pending.size();
}

SubmitOutcome LabelEngine::submit_to_new_entity(const CampaignId& campaign,
                                                const std::string& external_ref,
                                                std::string content_snapshot, const UserId& user,
                                                std::vector<LabelValue> values,
                                                std::optional<std::string> note) {
  if (external_ref.empty()) fail(ErrorCode::kInvalidArgument, "external_ref is empty");
  {
    std::unique_lock lock(ws_.registry_mutex());
    require_member(ws_, user);
    auto* c = ws_.find_campaign(campaign);
    if (!c) fail(ErrorCode::kUnknownCampaign, "unknown campaign '" + campaign.str() + "'");
    if (!c->by_ref.contains(external_ref)) {
      values = normalize_values(schema_of(ws_, campaign), std::move(values));
      const EntityId id{ws_.allocate_id('e')};
      const auto at = ws_.clock().now();
      Json batch{{"op", "batch"},
                 {"events",
                  Json::array({make_add_entity_event(id, campaign, external_ref,
                                                     std::move(content_snapshot), user, at),
                               submit_event(id, user, values, note, at)})}};
      ws_.commit(batch);
      const auto& es = *ws_.find_entity(id);
      SubmitOutcome out;
      out.entity_link = id;
      out.primary_snapshot = es.primary->values;
      out.primary_revision = es.primary->revision;
      out.initialized_primary = true;
      out.created_entity = true;
      return out;
    }
  }
  std::optional<EntityId> existing;
  {
    std::shared_lock lock(ws_.registry_mutex());
    auto* c = ws_.find_campaign(campaign);
    existing = c->by_ref.find(external_ref)->second;
  }
  return submit_individual_label(user, *existing, std::move(values), std::move(note));
}

void LabelEngine::apply_submit(const Json& e) {
  auto& es = entity_or_throw(ws_, e.at("entity").get<EntityId>());
  const auto author = e.at("author").get<UserId>();
  auto values = e.at("values").get<std::vector<LabelValue>>();
  auto note = e.at("note").is_null() ? std::nullopt
                                     : std::optional<std::string>(e.at("note").get<std::string>());
  const auto at = e.at("at").get<Timestamp>();

  auto it = std::find_if(es.labels.begin(), es.labels.end(),
                         [&](const auto& l) { return l.author == author; });
  if (it != es.labels.end()) {
    it->values = std::move(values);
    it->note = std::move(note);
    it->updated_at = at;
  } else {
    es.labels.push_back(IndividualLabel{author, es.entity.id, std::move(values), std::move(note),
                                        at, at});
  }
  if (!es.primary) {
    const auto choices = es.labels.back().choices();
    es.primary = PrimaryLabel{es.entity.id, choices, 1,
                              {PrimaryRevision{1, choices, author, at, std::nullopt}}};
  }
  es.last_activity = std::max(es.last_activity, at);
}

void LabelEngine::apply_edit_primary(const Json& e) {
  auto& es = entity_or_throw(ws_, e.at("entity").get<EntityId>());
  auto values = e.at("values").get<ChoiceMap>();
  const auto editor = e.at("editor").get<UserId>();
  const auto at = e.at("at").get<Timestamp>();
  auto old_values = es.primary->values;

  auto& p = *es.primary;
  p.revision += 1;
  p.values = values;
  p.history.push_back(PrimaryRevision{
      p.revision, values, editor, at,
      e.at("rationale").is_null() ? std::nullopt
                                  : std::optional<std::string>(e.at("rationale").get<std::string>())});
  es.last_activity = std::max(es.last_activity, at);

  for (const auto& n : e.at("notifications")) {
    Notification note;
    note.id = n.at("id").get<NotificationId>();
    ws_.observe_id(note.id.str());
    note.recipient = n.at("recipient").get<UserId>();
    note.entity = es.entity.id;
    note.kind = NotificationKind::kPrimaryChanged;
    note.old_values = old_values;
    note.new_values = values;
    note.created_at = at;
    ws_.inbox().deliver(std::move(note));
  }
}

void LabelEngine::apply_mark_read(const Json& e) {
  ws_.inbox().mark_read(e.at("user").get<UserId>(), e.at("ids").get<std::vector<NotificationId>>());
}

}  // namespace wikibench
