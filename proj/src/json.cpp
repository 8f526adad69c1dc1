// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#include "wikibench/json.hpp"

namespace wikibench {

namespace {

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

void to_json(Json& j, Choice c) { j = std::string(to_string(c)); }
void from_json(const Json& j, Choice& c) {
  auto parsed = j.is_string() ? parse_choice(j.get<std::string>()) : std::nullopt;
  if (!parsed) throw Error(ErrorCode::kInvalidArgument, "choice must be 'positive' or 'negative'");
  c = *parsed;
}

void to_json(Json& j, Confidence c) { j = std::string(to_string(c)); }
void from_json(const Json& j, Confidence& c) {
  auto parsed = j.is_string() ? parse_confidence(j.get<std::string>()) : std::nullopt;
  if (!parsed) throw Error(ErrorCode::kInvalidArgument, "confidence must be 'high' or 'low'");
  c = *parsed;
}

void to_json(Json& j, Quadrant q) { j = std::string(to_string(q)); }

void to_json(Json& j, const LabelValue& v) {
  j = Json{{"dimension", v.dimension}, {"choice", v.choice}, {"confidence", v.confidence}};
}
void from_json(const Json& j, LabelValue& v) {
  v.dimension = required<std::string>(j, "dimension");
  v.choice = required<Choice>(j, "choice");
  v.confidence = optional_field<Confidence>(j, "confidence").value_or(Confidence::kHigh);
}

void to_json(Json& j, const TextRevision& r) {
  j = Json{{"revision", r.revision}, {"text", r.text}, {"author", r.author}, {"timestamp", r.at}};
}
void from_json(const Json& j, TextRevision& r) {
  r.revision = required<std::uint64_t>(j, "revision");
  r.text = required<std::string>(j, "text");
  r.author = required<UserId>(j, "author");
  r.at = required<Timestamp>(j, "timestamp");
}

void to_json(Json& j, const RevisionedText& t) { j = t.revisions; }
void from_json(const Json& j, RevisionedText& t) {
  if (!j.is_array()) throw Error(ErrorCode::kInvalidArgument, "revision history must be an array");
  t.revisions = j.get<std::vector<TextRevision>>();
}

void to_json(Json& j, const LabelDimension& d) {
  j = Json{{"name", d.name},
           {"positive_value", d.positive_value},
           {"negative_value", d.negative_value},
           {"definition_text", d.definition_text}};
}
void from_json(const Json& j, LabelDimension& d) {
  d.name = required<std::string>(j, "name");
  d.positive_value = required<std::string>(j, "positive_value");
  d.negative_value = required<std::string>(j, "negative_value");
  d.definition_text = optional_field<RevisionedText>(j, "definition_text").value_or(RevisionedText{});
}

void to_json(Json& j, const LabelSchema& s) { j = Json{{"dimensions", s.dimensions}}; }
void from_json(const Json& j, LabelSchema& s) {
  s.dimensions = required<std::vector<LabelDimension>>(j, "dimensions");
}

void to_json(Json& j, const ChoiceMap& m) {
  j = Json::object();
  for (const auto& [dim, c] : m) j[dim] = c;
}
void from_json(const Json& j, ChoiceMap& m) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "choices must be an object");
  m.clear();
  for (const auto& [dim, c] : j.items()) m.emplace(dim, c.get<Choice>());
}

void to_json(Json& j, const IndividualLabel& l) {
  j = Json{{"author", l.author},         {"entity", l.entity},
           {"values", l.values},         {"note", optional_json(l.note)},
           {"created_at", l.created_at}, {"updated_at", l.updated_at}};
}
void from_json(const Json& j, IndividualLabel& l) {
  l.author = required<UserId>(j, "author");
  l.entity = optional_field<EntityId>(j, "entity").value_or(EntityId{});
  l.values = required<std::vector<LabelValue>>(j, "values");
  l.note = optional_field<std::string>(j, "note");
  l.created_at = optional_field<Timestamp>(j, "created_at").value_or(0);
  l.updated_at = optional_field<Timestamp>(j, "updated_at").value_or(l.created_at);
}

void to_json(Json& j, const PrimaryRevision& r) {
  j = Json{{"revision", r.revision},
           {"values", r.values},
           {"editor", r.editor},
           {"timestamp", r.at},
           {"rationale", optional_json(r.rationale)}};
}
void from_json(const Json& j, PrimaryRevision& r) {
  r.revision = required<std::uint64_t>(j, "revision");
  r.values = required<ChoiceMap>(j, "values");
  r.editor = required<UserId>(j, "editor");
  r.at = required<Timestamp>(j, "timestamp");
  r.rationale = optional_field<std::string>(j, "rationale");
}

void to_json(Json& j, const PrimaryLabel& p) {
  j = Json{{"entity", p.entity}, {"values", p.values}, {"revision", p.revision},
           {"history", p.history}};
}
void from_json(const Json& j, PrimaryLabel& p) {
  p.entity = required<EntityId>(j, "entity");
  p.values = required<ChoiceMap>(j, "values");
  p.revision = required<std::uint64_t>(j, "revision");
  p.history = required<std::vector<PrimaryRevision>>(j, "history");
}

void to_json(Json& j, const Entity& e) {
  j = Json{{"id", e.id},
           {"campaign", e.campaign},
           {"external_ref", e.external_ref},
           {"content_snapshot", e.content_snapshot},
           {"added_by", e.added_by},
           {"added_at", e.added_at},
           {"excluded", e.excluded},
           {"exclusion_reason", optional_json(e.exclusion_reason)}};
}
void from_json(const Json& j, Entity& e) {
  e.id = required<EntityId>(j, "id");
  e.campaign = optional_field<CampaignId>(j, "campaign").value_or(CampaignId{});
  e.external_ref = required<std::string>(j, "external_ref");
  e.content_snapshot = optional_field<std::string>(j, "content_snapshot").value_or("");
  e.added_by = required<UserId>(j, "added_by");
  e.added_at = required<Timestamp>(j, "added_at");
  e.excluded = optional_field<bool>(j, "excluded").value_or(false);
  e.exclusion_reason = optional_field<std::string>(j, "exclusion_reason");
}

void to_json(Json& j, const Post& p) {
  j = Json{{"id", p.id},
           {"author", p.author},
           {"body", p.body},
           {"timestamp", p.at},
           {"parent", p.parent ? Json(*p.parent) : Json(nullptr)}};
}
void from_json(const Json& j, Post& p) {
  p.id = required<PostId>(j, "id");
  p.author = required<UserId>(j, "author");
  p.body = required<std::string>(j, "body");
  p.at = required<Timestamp>(j, "timestamp");
  p.parent = optional_field<PostId>(j, "parent");
}

void to_json(Json& j, const Topic& t) { j = Json{{"title", t.title}, {"posts", t.posts}}; }
void from_json(const Json& j, Topic& t) {
  t.title = required<std::string>(j, "title");
  t.posts = required<std::vector<Post>>(j, "posts");
}

void to_json(Json& j, const ThreadScope& s) {
  j = Json{{"kind", s.is_campaign() ? "campaign" : "entity"},
           {"campaign", s.campaign},
           {"entity", s.entity ? Json(*s.entity) : Json(nullptr)}};
}

void to_json(Json& j, const TalkThread& t) { j = Json{{"scope", t.scope}, {"topics", t.topics}}; }

void to_json(Json& j, const DatasheetSection& s) { j = Json{{"name", s.name}, {"text", s.text}}; }
void from_json(const Json& j, DatasheetSection& s) {
  s.name = required<std::string>(j, "name");
  s.text = required<RevisionedText>(j, "text");
}

void to_json(Json& j, const Datasheet& d) { j = Json{{"sections", d.sections}}; }
void from_json(const Json& j, Datasheet& d) {
  d.sections = required<std::vector<DatasheetSection>>(j, "sections");
}

void to_json(Json& j, const QuadrantThresholds& t) {
  j = Json{{"disagreement", t.disagreement}, {"low_confidence", t.low_confidence}};
}
void from_json(const Json& j, QuadrantThresholds& t) {
  t.disagreement = optional_field<double>(j, "disagreement").value_or(0.5);
  t.low_confidence = optional_field<double>(j, "low_confidence").value_or(0.5);
}

void to_json(Json& j, const Campaign& c) {
  j = Json{{"id", c.id},
           {"name", c.name},
           {"schema", c.schema},
           {"datasheet", c.datasheet},
           {"thresholds", c.thresholds},
           {"created_by", c.created_by},
           {"created_at", c.created_at}};
}
void from_json(const Json& j, Campaign& c) {
  c.id = optional_field<CampaignId>(j, "id").value_or(CampaignId{});
  c.name = required<std::string>(j, "name");
  c.schema = required<LabelSchema>(j, "schema");
  c.datasheet = required<Datasheet>(j, "datasheet");
  c.thresholds = optional_field<QuadrantThresholds>(j, "thresholds").value_or(QuadrantThresholds{});
  c.created_by = optional_field<UserId>(j, "created_by").value_or(UserId{});
  c.created_at = optional_field<Timestamp>(j, "created_at").value_or(0);
}

void to_json(Json& j, const Notification& n) {
  j = Json{{"id", n.id},
           {"recipient", n.recipient},
           {"entity", n.entity},
           {"kind", std::string(to_string(n.kind))},
           {"old_values", n.old_values},
           {"new_values", n.new_values},
           {"created_at", n.created_at},
           {"read", n.read}};
}

namespace metrics {

void to_json(Json& j, const DimensionStats& s) {
  j = Json{{"dimension", s.dimension},
           {"disagreement", s.disagreement},
           {"low_conf_fraction", s.low_conf_fraction},
           {"quadrant", s.quadrant}};
}

void to_json(Json& j, const EntityStats& s) {
  j = Json{{"entity", s.entity},
           {"external_ref", s.external_ref},
           {"n_labels", s.n_labels},
           {"dimensions", s.dimensions}};
}

void to_json(Json& j, const ChoiceComposition& c) {
  j = Json{{"dimension", c.dimension},
           {"positive", c.positive},
           {"negative", c.negative},
           {"positive_fraction", c.positive_fraction},
           {"negative_fraction", c.negative_fraction}};
}

void to_json(Json& j, const CampaignStats& s) {
  j = Json{{"entities", s.entities},
           {"n_entities", s.n_entities},
           {"n_labeled", s.n_labeled},
           {"n_labels", s.n_labels},
           {"primary_composition", s.primary_composition},
           {"labels_per_user", s.labels_per_user},
           {"quadrant_counts", s.quadrant_counts}};
}

}  // namespace metrics
}  // namespace wikibench
