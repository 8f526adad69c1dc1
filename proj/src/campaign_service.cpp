// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#include "wikibench/campaign_service.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "wikibench/json.hpp"

namespace wikibench {

namespace {

CampaignState& campaign_or_throw(Workspace& ws, const CampaignId& id) {
  auto* c = ws.find_campaign(id);
  if (!c) fail(ErrorCode::kUnknownCampaign, "unknown campaign '" + id.str() + "'");
  return *c;
}

EntityState& entity_in_campaign(Workspace& ws, const CampaignId& campaign, const EntityId& id) {
  auto* e = ws.find_entity(id);
  if (!e || e->entity.campaign != campaign) {
    fail(ErrorCode::kUnknownEntity, "unknown entity '" + id.str() + "'");
  }
  return *e;
}

void require_member(const Workspace& ws, const UserId& user) {
  if (!ws.find_user(user)) fail(ErrorCode::kUnknownUser, "unknown user '" + user.str() + "'");
}

std::vector<UserId> parse_mentions(const Workspace& ws, std::string_view body,
                                   const UserId& author) {
  std::vector<UserId> out;
  auto is_name_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  };
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '@') continue;
    if (i > 0 && is_name_char(body[i - 1])) continue;  // e-mail address
    std::size_t j = i + 1;
    while (j < body.size() && is_name_char(body[j])) ++j;
    auto name = body.substr(i + 1, j - i - 1);
    while (!name.empty() && name.back() == '.') name.remove_suffix(1);
    UserId user{std::string(name)};
    if (!name.empty() && user != author && ws.find_user(user) &&
        std::find(out.begin(), out.end(), user) == out.end()) {
      out.push_back(std::move(user));
    }
    i = j;
  }
  return out;
}

Topic* find_topic(std::vector<Topic>& topics, std::string_view title) {
  for (auto& t : topics) {
    if (t.title == title) return &t;
  }
  return nullptr;
}

const Post* find_post(const Topic& topic, const PostId& id) {
  for (const auto& p : topic.posts) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

metrics::EntitySnapshot take_snapshot(const EntityState& es) {
  std::lock_guard lock(es.mu);
  return metrics::EntitySnapshot{es.entity, es.labels, es.primary, !es.talk.empty(),
                                 es.last_activity};
}

}  // namespace

std::string_view to_string(SortMode m) noexcept {
  switch (m) {
    case SortMode::kFewestLabels:
      return "fewest_labels";
    case SortMode::kHighestDisagreement:
      return "highest_disagreement";
    case SortMode::kDiffersFromMine:
      return "differs_from_mine";
    case SortMode::kRecentActivity:
      return "recent_activity";
  }
  return "recent_activity";
}

std::optional<SortMode> parse_sort_mode(std::string_view s) noexcept {
  for (auto m : {SortMode::kFewestLabels, SortMode::kHighestDisagreement,
                 SortMode::kDiffersFromMine, SortMode::kRecentActivity}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

void to_json(Json& j, const TableRow& row) {
  j = Json{{"entity", row.entity},
           {"external_ref", row.external_ref},
           {"primary", row.primary},
           {"n_labels", row.n_labels},
           {"disagreement", row.disagreement},
           {"has_discussion", row.has_discussion},
           {"differs_from_viewer", row.differs_from_viewer},
           {"last_activity", row.last_activity}};
}

Json make_add_entity_event(const EntityId& id, const CampaignId& campaign,
                           std::string external_ref, std::string content_snapshot,
                           const UserId& user, Timestamp at) {
  return Json{{"op", "add_entity"},
              {"entity", id},
              {"campaign", campaign},
              {"external_ref", std::move(external_ref)},
              {"content_snapshot", std::move(content_snapshot)},
              {"user", user},
              {"at", at}};
}

TableRow make_table_row(const metrics::EntitySnapshot& snap, const LabelSchema& schema,
                        const UserId& viewer) {
  TableRow row;
  row.entity = snap.entity.id;
  row.external_ref = snap.entity.external_ref;
  if (snap.primary) row.primary = snap.primary->values;
  row.n_labels = snap.labels.size();
  const auto stats = metrics::entity_stats(snap.entity.id, snap.entity.external_ref, schema,
                                           snap.labels, QuadrantThresholds{});
  row.disagreement = stats.max_disagreement();
  row.has_discussion = snap.has_discussion;
  row.last_activity = snap.last_activity;
  if (snap.primary) {
    for (const auto& label : snap.labels) {
      if (label.author != viewer) continue;
      row.differs_from_viewer = label.choices() != snap.primary->values;
    }
  }
  return row;
}

void sort_rows(std::vector<TableRow>& rows, SortMode mode) {
  auto by_id = [](const TableRow& a, const TableRow& b) { return a.entity < b.entity; };
  auto recent = [&](const TableRow& a, const TableRow& b) {
    if (a.last_activity != b.last_activity) return a.last_activity > b.last_activity;
    return by_id(a, b);
  };
  switch (mode) {
    case SortMode::kFewestLabels:
      std::sort(rows.begin(), rows.end(), [&](const TableRow& a, const TableRow& b) {
        if (a.n_labels != b.n_labels) return a.n_labels < b.n_labels;
        return by_id(a, b);
      });
      break;
    case SortMode::kHighestDisagreement:
      std::sort(rows.begin(), rows.end(), [&](const TableRow& a, const TableRow& b) {
        if (a.disagreement != b.disagreement) return a.disagreement > b.disagreement;
        return by_id(a, b);
      });
      break;
    case SortMode::kDiffersFromMine:
      std::sort(rows.begin(), rows.end(), [&](const TableRow& a, const TableRow& b) {
        if (a.differs_from_viewer != b.differs_from_viewer) return a.differs_from_viewer;
        return recent(a, b);
      });
      break;
    case SortMode::kRecentActivity:
      std::sort(rows.begin(), rows.end(), recent);
      break;
  }
}

CampaignService::CampaignService(Workspace& ws) : ws_(ws) {
  ws_.register_applier("create_campaign", [this](const Json& e) { apply_create_campaign(e); });
  ws_.register_applier("set_thresholds", [this](const Json& e) { apply_set_thresholds(e); });
  ws_.register_applier("add_entity", [this](const Json& e) { apply_add_entity(e); });
  ws_.register_applier("exclude_entity", [this](const Json& e) { apply_exclude(e); });
  ws_.register_applier("edit_section", [this](const Json& e) { apply_edit_section(e); });
  ws_.register_applier("add_section", [this](const Json& e) { apply_add_section(e); });
  ws_.register_applier("edit_definition", [this](const Json& e) { apply_edit_definition(e); });
  ws_.register_applier("post", [this](const Json& e) { apply_post(e); });
}

CampaignId CampaignService::create_campaign(const UserId& creator, std::string name,
                                            LabelSchema schema, Datasheet seed_datasheet,
                                            QuadrantThresholds thresholds) {
  if (name.empty()) fail(ErrorCode::kInvalidArgument, "campaign name is empty");
  const auto now = ws_.clock().now();
  // Seed missing revision metadata so callers may pass bare texts.
  for (auto& dim : schema.dimensions) {
    for (auto& r : dim.definition_text.revisions) {
      if (r.author.empty()) r.author = creator;
      if (r.at == 0) r.at = now;
    }
  }
  for (auto& section : seed_datasheet.sections) {
    for (auto& r : section.text.revisions) {
      if (r.author.empty()) r.author = creator;
      if (r.at == 0) r.at = now;
    }
  }
  validate_schema(schema);
  validate_datasheet(seed_datasheet);
  try {
    validate_thresholds(thresholds);
  } catch (const Error& e) {
    fail(ErrorCode::kInvalidSchema, e.what());
  }

  std::unique_lock lock(ws_.registry_mutex());
  require_member(ws_, creator);
  if (ws_.find_campaign_by_name(name)) {
    fail(ErrorCode::kDuplicateName, "campaign '" + name + "' already exists");
  }
  Campaign c;
  c.id = CampaignId{ws_.allocate_id('c')};
  c.name = std::move(name);
  c.schema = std::move(schema);
  c.datasheet = std::move(seed_datasheet);
  c.thresholds = thresholds;
  c.created_by = creator;
  c.created_at = now;
  const auto id = c.id;
  ws_.commit(Json{{"op", "create_campaign"}, {"campaign", c}});
  return id;
}

Campaign CampaignService::get_campaign(const CampaignId& id) const {
  std::shared_lock lock(ws_.registry_mutex());
  auto& c = campaign_or_throw(ws_, id);
  std::lock_guard clock(c.mu);
  return c.campaign;
}

std::vector<Campaign> CampaignService::list_campaigns() const {
  std::shared_lock lock(ws_.registry_mutex());
  std::vector<Campaign> out;
  for (const auto& id : ws_.campaign_ids()) {
    auto& c = campaign_or_throw(ws_, id);
    std::lock_guard clock(c.mu);
    out.push_back(c.campaign);
  }
  return out;
}

std::optional<CampaignId> CampaignService::find_campaign_by_name(std::string_view name) const {
  std::shared_lock lock(ws_.registry_mutex());
  auto* c = ws_.find_campaign_by_name(name);
  if (!c) return std::nullopt;
  return c->campaign.id;
}

void CampaignService::set_thresholds(const CampaignId& id, const QuadrantThresholds& thresholds,
                                     const UserId& user) {
  validate_thresholds(thresholds);
  std::shared_lock lock(ws_.registry_mutex());
  require_member(ws_, user);
  auto& c = campaign_or_throw(ws_, id);
  std::lock_guard clock(c.mu);
  ws_.commit(Json{{"op", "set_thresholds"}, {"campaign", id}, {"thresholds", thresholds}});
}

EntityId CampaignService::add_entity(const CampaignId& campaign, std::string external_ref,
                                     std::string content_snapshot, const UserId& user) {
  if (external_ref.empty()) fail(ErrorCode::kInvalidArgument, "external_ref is empty");
  std::unique_lock lock(ws_.registry_mutex());
  require_member(ws_, user);
  auto& c = campaign_or_throw(ws_, campaign);
  if (auto it = c.by_ref.find(external_ref); it != c.by_ref.end()) {
    Error err(ErrorCode::kDuplicateExternalRef,
              "external_ref '" + external_ref + "' already present as " + it->second.str());
    err.existing_id = it->second.str();
    throw err;
  }
  EntityId id{ws_.allocate_id('e')};
  ws_.commit(make_add_entity_event(id, campaign, std::move(external_ref),
                                   std::move(content_snapshot), user, ws_.clock().now()));
  return id;
}

std::optional<EntityId> CampaignService::find_entity_by_ref(const CampaignId& campaign,
                                                            std::string_view external_ref) const {
  std::shared_lock lock(ws_.registry_mutex());
  auto& c = campaign_or_throw(ws_, campaign);
  auto it = c.by_ref.find(external_ref);
  if (it == c.by_ref.end()) return std::nullopt;
  return it->second;
}

std::vector<TableRow> CampaignService::list_table(const CampaignId& campaign,
                                                  const UserId& viewer, SortMode sort,
                                                  std::size_t page,
                                                  std::size_t page_size) const {
  if (page_size == 0 || page_size > kMaxPageSize) {
    fail(ErrorCode::kInvalidArgument, "page_size must be in [1, " +
                                          std::to_string(kMaxPageSize) + "]");
  }
  const auto schema = get_campaign(campaign).schema;
  std::vector<TableRow> rows;
  for (const auto& snap : snapshot(campaign, /*include_excluded=*/false)) {
    rows.push_back(make_table_row(snap, schema, viewer));
  }
  sort_rows(rows, sort);
  const auto begin = std::min(rows.size(), page * page_size);
  const auto end = std::min(rows.size(), begin + page_size);
  return {rows.begin() + static_cast<std::ptrdiff_t>(begin),
          rows.begin() + static_cast<std::ptrdiff_t>(end)};
}

ExcludeResult CampaignService::exclude_entity(const CampaignId& campaign, const EntityId& entity,
                                              const UserId& user, std::string reason) {
  std::shared_lock lock(ws_.registry_mutex());
  require_member(ws_, user);
  auto& c = campaign_or_throw(ws_, campaign);
  auto& es = entity_in_campaign(ws_, campaign, entity);
  std::lock_guard clock(c.mu);
  std::lock_guard elock(es.mu);
  if (es.entity.excluded) return ExcludeResult::kAlreadyExcluded;
  ws_.commit(Json{{"op", "exclude_entity"},
                  {"campaign", campaign},
                  {"entity", entity},
                  {"user", user},
                  {"reason", std::move(reason)},
                  {"at", ws_.clock().now()}});
  return ExcludeResult::kExcluded;
}

TextRevision CampaignService::edit_datasheet_section(const CampaignId& campaign,
                                                     std::string_view section,
                                                     std::string new_text, const UserId& user) {
  std::shared_lock lock(ws_.registry_mutex());
  require_member(ws_, user);
  auto& c = campaign_or_throw(ws_, campaign);
  std::lock_guard clock(c.mu);
  auto* s = c.campaign.datasheet.find(section);
  if (!s) fail(ErrorCode::kUnknownSection, "unknown datasheet section '" + std::string(section) + "'");
  ws_.commit(Json{{"op", "edit_section"},
                  {"campaign", campaign},
                  {"section", section},
                  {"text", std::move(new_text)},
                  {"user", user},
                  {"at", ws_.clock().now()}});
  return s->text.revisions.back();
}

TextRevision CampaignService::add_datasheet_section(const CampaignId& campaign,
                                                    std::string section, std::string text,
                                                    const UserId& user) {
  if (section.empty()) fail(ErrorCode::kInvalidArgument, "section name is empty");
  std::shared_lock lock(ws_.registry_mutex());
  require_member(ws_, user);
  auto& c = campaign_or_throw(ws_, campaign);
  std::lock_guard clock(c.mu);
  if (c.campaign.datasheet.find(section)) {
    fail(ErrorCode::kDuplicateName, "datasheet section '" + section + "' already exists");
  }
  ws_.commit(Json{{"op", "add_section"},
                  {"campaign", campaign},
                  {"section", section},
                  {"text", std::move(text)},
                  {"user", user},
                  {"at", ws_.clock().now()}});
  return c.campaign.datasheet.find(section)->text.revisions.back();
}

RevisionedText CampaignService::datasheet_history(const CampaignId& campaign,
                                                  std::string_view section) const {
  std::shared_lock lock(ws_.registry_mutex());
  auto& c = campaign_or_throw(ws_, campaign);
  std::lock_guard clock(c.mu);
  const auto* s = c.campaign.datasheet.find(section);
  if (!s) fail(ErrorCode::kUnknownSection, "unknown datasheet section '" + std::string(section) + "'");
  return s->text;
}

TextRevision CampaignService::edit_dimension_definition(const CampaignId& campaign,
                                                        std::string_view dimension,
                                                        std::string new_text,
                                                        const UserId& user) {
  std::shared_lock lock(ws_.registry_mutex());
  require_member(ws_, user);
  auto& c = campaign_or_throw(ws_, campaign);
  std::lock_guard clock(c.mu);
  auto idx = c.campaign.schema.index_of(dimension);
  if (!idx) fail(ErrorCode::kUnknownDimension, "unknown dimension '" + std::string(dimension) + "'");
  ws_.commit(Json{{"op", "edit_definition"},
                  {"campaign", campaign},
                  {"dimension", dimension},
                  {"text", std::move(new_text)},
                  {"user", user},
                  {"at", ws_.clock().now()}});
  return c.campaign.schema.dimensions[*idx].definition_text.revisions.back();
}

PostId CampaignService::post_to_thread(const ThreadScope& scope, std::string topic_title,
                                       std::string body, const UserId& user,
                                       std::optional<PostId> parent) {
  if (topic_title.empty()) fail(ErrorCode::kInvalidArgument, "topic title is empty");
  std::shared_lock lock(ws_.registry_mutex());
  require_member(ws_, user);
  auto* c = ws_.find_campaign(scope.campaign);
  if (!c) fail(ErrorCode::kUnknownScope, "unknown campaign '" + scope.campaign.str() + "'");
  EntityState* es = nullptr;
  if (scope.entity) {
    es = ws_.find_entity(*scope.entity);
    if (!es || es->entity.campaign != scope.campaign) {
      fail(ErrorCode::kUnknownScope, "unknown entity '" + scope.entity->str() + "'");
    }
  }
  std::lock_guard clock(c->mu);
  std::unique_lock<std::mutex> elock;
  if (es) elock = std::unique_lock(es->mu);
  auto& topics = es ? es->talk : c->talk;

  if (parent) {
    auto* topic = find_topic(topics, topic_title);
    const Post* p = topic ? find_post(*topic, *parent) : nullptr;
    if (!p) fail(ErrorCode::kUnknownParent, "no post '" + parent->str() + "' in topic");
    if (p->parent) parent = p->parent;  // one level of nesting
  }

  const PostId id{ws_.allocate_id('p')};
  Json mentions = Json::array();
  for (const auto& who : parse_mentions(ws_, body, user)) {
    mentions.push_back(Json{{"id", ws_.allocate_id('n')}, {"recipient", who}});
  }
  Post post{id, user, std::move(body), ws_.clock().now(), parent};
  ws_.commit(Json{{"op", "post"},
                  {"campaign", scope.campaign},
                  {"entity", scope.entity ? Json(*scope.entity) : Json(nullptr)},
                  {"topic", std::move(topic_title)},
                  {"post", post},
                  {"mentions", std::move(mentions)}});
  return id;
}

std::vector<Topic> CampaignService::thread(const ThreadScope& scope) const {
  std::shared_lock lock(ws_.registry_mutex());
  auto* c = ws_.find_campaign(scope.campaign);
  if (!c) fail(ErrorCode::kUnknownScope, "unknown campaign '" + scope.campaign.str() + "'");
  if (scope.entity) {
    auto* es = ws_.find_entity(*scope.entity);
    if (!es || es->entity.campaign != scope.campaign) {
      fail(ErrorCode::kUnknownScope, "unknown entity '" + scope.entity->str() + "'");
    }
    std::lock_guard elock(es->mu);
    return es->talk;
  }
  std::lock_guard clock(c->mu);
  return c->talk;
}

std::vector<metrics::EntitySnapshot> CampaignService::snapshot(const CampaignId& campaign,
                                                               bool include_excluded) const {
  // Writers hold the registry lock shared; taking it unique gives a cut that
  // no mutation straddles.
  std::unique_lock lock(ws_.registry_mutex());
  auto& c = campaign_or_throw(ws_, campaign);
  std::vector<metrics::EntitySnapshot> out;
  out.reserve(c.entities.size());
  for (const auto& id : c.entities) {
    const auto* es = ws_.find_entity(id);
    if (!es) continue;
    if (!include_excluded && es->entity.excluded) continue;
    out.push_back(take_snapshot(*es));
  }
  return out;
}

metrics::CampaignStats CampaignService::campaign_stats(const CampaignId& campaign) const {
  const auto c = get_campaign(campaign);
  return metrics::campaign_stats(c, snapshot(campaign, /*include_excluded=*/false));
}

// Appliers. Locks are held by the committing caller (or nothing runs
// concurrently during replay).

void CampaignService::apply_create_campaign(const Json& e) {
  ws_.insert_campaign(e.at("campaign").get<Campaign>());
}

void CampaignService::apply_set_thresholds(const Json& e) {
  auto& c = campaign_or_throw(ws_, e.at("campaign").get<CampaignId>());
  c.campaign.thresholds = e.at("thresholds").get<QuadrantThresholds>();
}

void CampaignService::apply_add_entity(const Json& e) {
  auto& c = campaign_or_throw(ws_, e.at("campaign").get<CampaignId>());
  Entity entity;
  entity.id = e.at("entity").get<EntityId>();
  entity.campaign = c.campaign.id;
  entity.external_ref = e.at("external_ref").get<std::string>();
  entity.content_snapshot = e.at("content_snapshot").get<std::string>();
  entity.added_by = e.at("user").get<UserId>();
  entity.added_at = e.at("at").get<Timestamp>();
  c.entities.push_back(entity.id);
  c.by_ref.emplace(entity.external_ref, entity.id);
  ws_.insert_entity(std::move(entity));
}

void CampaignService::apply_exclude(const Json& e) {
  auto& c = campaign_or_throw(ws_, e.at("campaign").get<CampaignId>());
  auto* es = ws_.find_entity(e.at("entity").get<EntityId>());
  const auto reason = e.at("reason").get<std::string>();
  const auto user = e.at("user").get<UserId>();
  const auto at = e.at("at").get<Timestamp>();
  es->entity.excluded = true;
  es->entity.exclusion_reason = reason;
  es->last_activity = std::max(es->last_activity, at);
  auto* criteria = c.campaign.datasheet.find(Datasheet::kInclusionCriteria);
  std::string text = criteria->text.current();
  if (!text.empty() && text.back() != '\n') text.push_back('\n');
  text += "Excluded " + es->entity.external_ref + " (" + es->entity.id.str() + "): " + reason;
  criteria->text.append(std::move(text), user, at);
}

void CampaignService::apply_edit_section(const Json& e) {
  auto& c = campaign_or_throw(ws_, e.at("campaign").get<CampaignId>());
  auto* s = c.campaign.datasheet.find(e.at("section").get<std::string>());
  s->text.append(e.at("text").get<std::string>(), e.at("user").get<UserId>(),
                 e.at("at").get<Timestamp>());
}

void CampaignService::apply_add_section(const Json& e) {
  auto& c = campaign_or_throw(ws_, e.at("campaign").get<CampaignId>());
  DatasheetSection s{e.at("section").get<std::string>(), {}};
  s.text.append(e.at("text").get<std::string>(), e.at("user").get<UserId>(),
                e.at("at").get<Timestamp>());
  c.campaign.datasheet.sections.push_back(std::move(s));
}

void CampaignService::apply_edit_definition(const Json& e) {
  auto& c = campaign_or_throw(ws_, e.at("campaign").get<CampaignId>());
  auto idx = c.campaign.schema.index_of(e.at("dimension").get<std::string>());
  c.campaign.schema.dimensions[*idx].definition_text.append(
      e.at("text").get<std::string>(), e.at("user").get<UserId>(), e.at("at").get<Timestamp>());
}

void CampaignService::apply_post(const Json& e) {
  auto& c = campaign_or_throw(ws_, e.at("campaign").get<CampaignId>());
  auto post = e.at("post").get<Post>();
  ws_.observe_id(post.id.str());
  EntityState* es = nullptr;
  if (!e.at("entity").is_null()) es = ws_.find_entity(e.at("entity").get<EntityId>());
  auto& topics = es ? es->talk : c.talk;
  const auto title = e.at("topic").get<std::string>();
  auto* topic = find_topic(topics, title);
  if (!topic) {
    topics.push_back(Topic{title, {}});
    topic = &topics.back();
  }
  const auto at = post.at;
  topic->posts.push_back(std::move(post));
  if (es) es->last_activity = std::max(es->last_activity, at);
  for (const auto& m : e.at("mentions")) {
    Notification n;
    n.id = m.at("id").get<NotificationId>();
    ws_.observe_id(n.id.str());
    n.recipient = m.at("recipient").get<UserId>();
    if (es) n.entity = es->entity.id;
    n.kind = NotificationKind::kMentioned;
    n.created_at = at;
    ws_.inbox().deliver(std::move(n));
  }
}

}  // namespace wikibench
