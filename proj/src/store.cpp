// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#include "wikibench/store.hpp"

#include <algorithm>
#include <set>

#include "wikibench/csv.hpp"
#include "wikibench/metrics.hpp"

namespace wikibench::store {

namespace {

constexpr std::string_view kFormatTag = "wikibench-export";
constexpr int kFormatVersion = 1;
constexpr std::string_view kSpecials = "\\|;,=/";

// ---- label cell packing -------------------------------------------------

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (kSpecials.find(c) != std::string_view::npos) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

/// Splits on unescaped `sep`, keeping escapes intact for the next level.
std::vector<std::string> split_escaped(std::string_view s, char sep) {
  std::vector<std::string> parts(1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      parts.back().push_back(s[i]);
      parts.back().push_back(s[++i]);
    } else if (s[i] == sep) {
      parts.emplace_back();
    } else {
      parts.back().push_back(s[i]);
    }
  }
  return parts;
}

std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) ++i;
    out.push_back(s[i]);
  }
  return out;
}

std::string number(double x) { return Json(x).dump(); }

[[noreturn]] void parse_fail(std::size_t line, const std::string& reason) {
  Error err(ErrorCode::kParseError, "line " + std::to_string(line) + ": " + reason);
  err.line = line;
  throw err;
}

// ---- campaign header ----------------------------------------------------

Json campaign_header(const Campaign& c) {
  Json dims = Json::array();
  for (const auto& d : c.schema.dimensions) {
    dims.push_back(Json{{"name", d.name},
                        {"positive_value", d.positive_value},
                        {"negative_value", d.negative_value},
                        {"definition", d.definition_text.current()}});
  }
  Json sections = Json::array();
  for (const auto& s : c.datasheet.sections) {
    sections.push_back(Json{{"name", s.name}, {"text", s.text.current()}});
  }
  return Json{{"name", c.name},
              {"schema", Json{{"dimensions", dims}}},
              {"datasheet", sections},
              {"thresholds", c.thresholds}};
}

Campaign campaign_from_header(const Json& h, const UserId& importer, Timestamp at) {
  Campaign c;
  c.name = required<std::string>(h, "name");
  const auto schema = required<Json>(h, "schema");
  for (const auto& d : required<Json>(schema, "dimensions")) {
    LabelDimension dim;
    dim.name = required<std::string>(d, "name");
    dim.positive_value = required<std::string>(d, "positive_value");
    dim.negative_value = required<std::string>(d, "negative_value");
    dim.definition_text.append(optional_field<std::string>(d, "definition").value_or(""),
                               importer, at);
    c.schema.dimensions.push_back(std::move(dim));
  }
  for (const auto& s : required<Json>(h, "datasheet")) {
    DatasheetSection section{required<std::string>(s, "name"), {}};
    section.text.append(required<std::string>(s, "text"), importer, at);
    c.datasheet.sections.push_back(std::move(section));
  }
  c.thresholds = optional_field<QuadrantThresholds>(h, "thresholds").value_or(QuadrantThresholds{});
  c.created_by = importer;
  c.created_at = at;
  return c;
}

void validate_campaign(const Campaign& c) {
  try {
    validate_schema(c.schema);
    validate_datasheet(c.datasheet);
    validate_thresholds(c.thresholds);
  } catch (const Error& e) {
    fail(ErrorCode::kSchemaMismatch, std::string("header: ") + e.what());
  }
}

// ---- parsed entity ------------------------------------------------------

struct ImportedEntity {
  std::string external_ref;
  std::string content_snapshot;
  UserId added_by;
  Timestamp added_at = 0;
  std::vector<IndividualLabel> labels;
  std::optional<ChoiceMap> primary;
  std::size_t line = 0;
};

void check_entity(ImportedEntity& e, const LabelSchema& schema) {
  for (auto& l : e.labels) l.values = normalize_values(schema, std::move(l.values));
  std::set<UserId> authors;
  for (const auto& l : e.labels) {
    if (!authors.insert(l.author).second) {
      parse_fail(e.line, "author '" + l.author.str() + "' labels the entity twice");
    }
  }
  if (e.primary) {
    *e.primary = normalize_choices(schema, *e.primary);
    if (e.labels.empty()) parse_fail(e.line, "primary label without individual labels");
  }
}

/// Builds the single batch event for a whole import and commits it.
CampaignId commit_import(Service& service, Campaign campaign,
                         std::vector<ImportedEntity> entities, const UserId& importer) {
  auto& ws = service.workspace();
  std::stable_sort(entities.begin(), entities.end(),
                   [](const auto& a, const auto& b) { return a.added_at < b.added_at; });
  std::unique_lock lock(ws.registry_mutex());
  if (!ws.find_user(importer)) {
    fail(ErrorCode::kUnknownUser, "unknown user '" + importer.str() + "'");
  }
  if (ws.find_campaign_by_name(campaign.name)) {
    fail(ErrorCode::kDuplicateName, "campaign '" + campaign.name + "' already exists");
  }
  campaign.id = CampaignId{ws.allocate_id('c')};
  const auto now = ws.clock().now();

  Json events = Json::array();
  std::set<UserId> new_users;
  auto note_user = [&](const UserId& u) {
    if (!ws.find_user(u)) new_users.insert(u);
  };
  for (const auto& e : entities) {
    note_user(e.added_by);
    for (const auto& l : e.labels) note_user(l.author);
  }
  for (const auto& u : new_users) {
    events.push_back(Json{{"op", "register_user"},
                          {"user", u},
                          {"display_name", u.str()},
                          {"token_hash", ""},
                          {"imported", true},
                          {"at", now}});
  }
  events.push_back(Json{{"op", "create_campaign"}, {"campaign", campaign}});
  for (auto& e : entities) {
    Entity entity;
    entity.id = EntityId{ws.allocate_id('e')};
    entity.campaign = campaign.id;
    entity.external_ref = e.external_ref;
    entity.content_snapshot = e.content_snapshot;
    entity.added_by = e.added_by;
    entity.added_at = e.added_at;
    std::stable_sort(e.labels.begin(), e.labels.end(),
                     [](const auto& a, const auto& b) { return a.created_at < b.created_at; });
    Json primary = nullptr;
    if (!e.labels.empty()) {
      const ChoiceMap values = e.primary ? *e.primary : e.labels.front().choices();
      Timestamp at = e.added_at;
      for (auto& l : e.labels) {
        l.entity = entity.id;
        at = std::max(at, l.updated_at);
      }
      primary = PrimaryLabel{entity.id, values, 1,
                             {PrimaryRevision{1, values, importer, at, "imported"}}};
    }
    events.push_back(Json{{"op", "import_entity"},
                          {"entity", entity},
                          {"labels", e.labels},
                          {"primary", primary}});
  }
  const auto id = campaign.id;
  ws.commit(Json{{"op", "batch"}, {"events", std::move(events)}});
  return id;
}

// ---- JSONL ----------------------------------------------------------------

IndividualLabel label_from_export(const Json& j) {
  IndividualLabel l;
  l.author = required<UserId>(j, "author");
  l.values = required<std::vector<LabelValue>>(j, "values");
  l.note = optional_field<std::string>(j, "note");
  l.created_at = required<Timestamp>(j, "created_at");
  l.updated_at = required<Timestamp>(j, "updated_at");
  return l;
}

CampaignId import_jsonl(Service& service, std::string_view data, const UserId& importer,
                        const ImportOptions& options) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t line_no = 0;
  for (std::size_t pos = 0; pos < data.size();) {
    auto nl = data.find('\n', pos);
    if (nl == std::string_view::npos) nl = data.size();
    ++line_no;
    auto line = data.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.emplace_back(line_no, line);
    pos = nl + 1;
  }
  if (lines.empty()) parse_fail(1, "empty input");

  auto parse_line = [](std::size_t no, std::string_view text) {
    auto j = Json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) parse_fail(no, "malformed JSON record");
    return j;
  };

  const auto header = parse_line(lines[0].first, lines[0].second);
  if (header.value("record", "") != "header" || header.value("format", "") != kFormatTag) {
    fail(ErrorCode::kSchemaMismatch, "first line is not a wikibench export header");
  }
  const auto now = service.workspace().clock().now();
  Campaign campaign;
  try {
    campaign = campaign_from_header(required<Json>(header, "campaign"), importer, now);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) fail(ErrorCode::kSchemaMismatch, e.what());
    throw;
  }
  if (options.name) campaign.name = *options.name;
  validate_campaign(campaign);

  std::vector<ImportedEntity> entities;
  std::set<std::string> refs;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto [no, text] = lines[i];
    const auto j = parse_line(no, text);
    try {
      ImportedEntity e;
      e.line = no;
      e.external_ref = required<std::string>(j, "external_ref");
      e.content_snapshot = optional_field<std::string>(j, "content_snapshot").value_or("");
      e.added_by = required<UserId>(j, "added_by");
      e.added_at = required<Timestamp>(j, "added_at");
      for (const auto& l : required<Json>(j, "labels")) e.labels.push_back(label_from_export(l));
      e.primary = optional_field<ChoiceMap>(j, "primary");
      if (!refs.insert(e.external_ref).second) {
        parse_fail(no, "duplicate external_ref '" + e.external_ref + "'");
      }
      check_entity(e, campaign.schema);
      entities.push_back(std::move(e));
    } catch (Error& e) {
      if (e.code() == ErrorCode::kInvalidArgument) parse_fail(no, e.what());
      if (!e.line) e.line = no;
      throw;
    }
  }
  return commit_import(service, std::move(campaign), std::move(entities), importer);
}

// ---- CSV ------------------------------------------------------------------

std::vector<std::string> csv_columns(const LabelSchema& schema) {
  std::vector<std::string> cols{"record",   "external_ref", "content_snapshot",
                                "added_by", "added_at",     "n_labels"};
  for (const auto& d : schema.dimensions) {
    cols.push_back("primary:" + d.name);
    cols.push_back("disagreement:" + d.name);
    cols.push_back("low_conf_fraction:" + d.name);
  }
  cols.push_back("labels");
  cols.push_back("meta");
  return cols;
}

std::string pack_labels(const Json& labels) {
  std::string out;
  bool first = true;
  for (const auto& l : labels) {
    if (!first) out.push_back('|');
    first = false;
    out += escape(l.at("author").get<std::string>());
    out += ';' + std::to_string(l.at("created_at").get<Timestamp>());
    out += ';' + std::to_string(l.at("updated_at").get<Timestamp>());
    out.push_back(';');
    bool first_value = true;
    for (const auto& v : l.at("values")) {
      if (!first_value) out.push_back(',');
      first_value = false;
      out += escape(v.at("dimension").get<std::string>());
      out += '=' + v.at("choice").get<std::string>() + '/' + v.at("confidence").get<std::string>();
    }
    if (!l.at("note").is_null()) out += ';' + escape(l.at("note").get<std::string>());
  }
  return out;
}

Timestamp parse_int(std::string_view s, std::size_t line, std::string_view what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoll(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    parse_fail(line, "bad " + std::string(what) + " '" + std::string(s) + "'");
  }
}

std::vector<IndividualLabel> unpack_labels(std::string_view cell, std::size_t line) {
  std::vector<IndividualLabel> out;
  if (cell.empty()) return out;
  for (const auto& packed : split_escaped(cell, '|')) {
    const auto parts = split_escaped(packed, ';');
    if (parts.size() != 4 && parts.size() != 5) parse_fail(line, "malformed label entry");
    IndividualLabel l;
    l.author = UserId{unescape(parts[0])};
    l.created_at = parse_int(parts[1], line, "created_at");
    l.updated_at = parse_int(parts[2], line, "updated_at");
    for (const auto& kv : split_escaped(parts[3], ',')) {
      const auto dim_value = split_escaped(kv, '=');
      if (dim_value.size() != 2) parse_fail(line, "malformed label value");
      const auto choice_conf = split_escaped(dim_value[1], '/');
      if (choice_conf.size() != 2) parse_fail(line, "malformed label value");
      auto choice = parse_choice(choice_conf[0]);
      auto conf = parse_confidence(choice_conf[1]);
      if (!choice || !conf) parse_fail(line, "bad choice or confidence in label");
      l.values.push_back(LabelValue{unescape(dim_value[0]), *choice, *conf});
    }
    if (parts.size() == 5) l.note = unescape(parts[4]);
    out.push_back(std::move(l));
  }
  return out;
}

CampaignId import_csv(Service& service, std::string_view data, const UserId& importer,
                      const ImportOptions& options) {
  auto records = csv::parse(data);
  std::erase_if(records, [](const csv::Record& r) {
    return r.fields.size() == 1 && r.fields[0].empty();
  });
  if (records.size() < 2) fail(ErrorCode::kSchemaMismatch, "CSV export needs a header and campaign row");
  const auto& header = records[0].fields;
  auto col = [&](std::string_view name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      fail(ErrorCode::kSchemaMismatch, "missing column '" + std::string(name) + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto c_record = col("record");
  const auto c_meta = col("meta");
  const auto& meta_row = records[1];
  if (meta_row.fields.size() != header.size() || meta_row.fields[c_record] != "campaign") {
    fail(ErrorCode::kSchemaMismatch, "second record must be the campaign row");
  }
  auto meta = Json::parse(meta_row.fields[c_meta], nullptr, false);
  if (meta.is_discarded()) parse_fail(meta_row.line, "campaign meta is not JSON");
  const auto now = service.workspace().clock().now();
  Campaign campaign;
  try {
    campaign = campaign_from_header(meta, importer, now);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) fail(ErrorCode::kSchemaMismatch, e.what());
    throw;
  }
  if (options.name) campaign.name = *options.name;
  validate_campaign(campaign);
  if (header != csv_columns(campaign.schema)) {
    fail(ErrorCode::kSchemaMismatch, "CSV columns do not match the campaign schema");
  }

  const auto c_ref = col("external_ref");
  const auto c_snapshot = col("content_snapshot");
  const auto c_added_by = col("added_by");
  const auto c_added_at = col("added_at");
  const auto c_labels = col("labels");
  std::vector<ImportedEntity> entities;
  std::set<std::string> refs;
  for (std::size_t i = 2; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.fields.size() != header.size()) {
      parse_fail(r.line, "expected " + std::to_string(header.size()) + " fields, got " +
                             std::to_string(r.fields.size()));
    }
    if (r.fields[c_record] != "entity") parse_fail(r.line, "unexpected record type");
    try {
      ImportedEntity e;
      e.line = r.line;
      e.external_ref = r.fields[c_ref];
      e.content_snapshot = r.fields[c_snapshot];
      e.added_by = UserId{r.fields[c_added_by]};
      e.added_at = parse_int(r.fields[c_added_at], r.line, "added_at");
      e.labels = unpack_labels(r.fields[c_labels], r.line);
      ChoiceMap primary;
      for (const auto& d : campaign.schema.dimensions) {
        const auto& cell = r.fields[col("primary:" + d.name)];
        if (cell.empty()) continue;
        auto choice = parse_choice(cell);
        if (!choice) parse_fail(r.line, "bad primary choice '" + cell + "'");
        primary.emplace(d.name, *choice);
      }
      if (!primary.empty()) e.primary = std::move(primary);
      if (!refs.insert(e.external_ref).second) {
        parse_fail(r.line, "duplicate external_ref '" + e.external_ref + "'");
      }
      check_entity(e, campaign.schema);
      entities.push_back(std::move(e));
    } catch (Error& e) {
      if (!e.line) e.line = r.line;
      throw;
    }
  }
  return commit_import(service, std::move(campaign), std::move(entities), importer);
}

}  // namespace

std::string_view to_string(Format f) noexcept { return f == Format::kJsonl ? "jsonl" : "csv"; }

std::optional<Format> parse_format(std::string_view s) noexcept {
  if (s == "jsonl") return Format::kJsonl;
  if (s == "csv") return Format::kCsv;
  return std::nullopt;
}

std::string pseudonym(std::string_view salt, std::string_view campaign_name, const UserId& user) {
  std::string material(salt);
  material.push_back('\0');
  material += campaign_name;
  material.push_back('\0');
  material += user.str();
  return "u-" + sha256_hex(material).substr(0, 16);
}

Json export_record(const metrics::EntitySnapshot& snap, const Campaign& campaign,
                   const std::function<std::string(const UserId&)>& author_name) {
  auto labels = snap.labels;
  std::stable_sort(labels.begin(), labels.end(),
                   [](const auto& a, const auto& b) { return a.created_at < b.created_at; });
  Json jl = Json::array();
  for (const auto& l : labels) {
    jl.push_back(Json{{"author", author_name(l.author)},
                      {"values", l.values},
                      {"note", l.note ? Json(*l.note) : Json(nullptr)},
                      {"created_at", l.created_at},
                      {"updated_at", l.updated_at}});
  }
  const auto stats = metrics::entity_stats(snap.entity.id, snap.entity.external_ref,
                                           campaign.schema, snap.labels, campaign.thresholds);
  Json disagreement = Json::object();
  Json low_conf = Json::object();
  for (const auto& d : stats.dimensions) {
    disagreement[d.dimension] = d.disagreement;
    low_conf[d.dimension] = d.low_conf_fraction;
  }
  return Json{{"record", "entity"},
              {"external_ref", snap.entity.external_ref},
              {"content_snapshot", snap.entity.content_snapshot},
              {"added_by", author_name(snap.entity.added_by)},
              {"added_at", snap.entity.added_at},
              {"primary", snap.primary ? Json(snap.primary->values) : Json(nullptr)},
              {"labels", std::move(jl)},
              {"n_labels", snap.labels.size()},
              {"disagreement", std::move(disagreement)},
              {"low_conf_fraction", std::move(low_conf)}};
}

std::string export_campaign(const Service& service, const CampaignId& campaign_id, Format format,
                            const ExportOptions& options) {
  const auto campaign = service.campaigns().get_campaign(campaign_id);
  auto snaps = service.campaigns().snapshot(campaign_id, /*include_excluded=*/false);
  std::stable_sort(snaps.begin(), snaps.end(), [](const auto& a, const auto& b) {
    if (a.entity.added_at != b.entity.added_at) return a.entity.added_at < b.entity.added_at;
    return a.entity.id < b.entity.id;
  });

  std::set<UserId> verbatim;
  for (const auto& u : service.workspace().users()) {
    if (u.imported) verbatim.insert(u.id);
  }
  auto author_name = [&](const UserId& u) {
    if (!options.pseudonymize || verbatim.contains(u)) return u.str();
    return pseudonym(options.salt, campaign.name, u);
  };

  const auto header_campaign = campaign_header(campaign);
  std::string out;
  if (format == Format::kJsonl) {
    out += Json{{"record", "header"},
                {"format", kFormatTag},
                {"version", kFormatVersion},
                {"campaign", header_campaign},
                {"pseudonymized", options.pseudonymize}}
               .dump();
    out.push_back('\n');
    for (const auto& snap : snaps) {
      out += export_record(snap, campaign, author_name).dump();
      out.push_back('\n');
    }
    return out;
  }

  const auto columns = csv_columns(campaign.schema);
  out += csv::write_row(columns);
  csv::Row meta(columns.size());
  meta.front() = "campaign";
  meta.back() = header_campaign.dump();
  out += csv::write_row(meta);
  for (const auto& snap : snaps) {
    const auto rec = export_record(snap, campaign, author_name);
    csv::Row row{"entity",
                 rec.at("external_ref").get<std::string>(),
                 rec.at("content_snapshot").get<std::string>(),
                 rec.at("added_by").get<std::string>(),
                 std::to_string(rec.at("added_at").get<Timestamp>()),
                 std::to_string(rec.at("n_labels").get<std::size_t>())};
    for (const auto& d : campaign.schema.dimensions) {
      const auto& p = rec.at("primary");
      row.push_back(p.is_null() ? "" : p.at(d.name).get<std::string>());
      row.push_back(number(rec.at("disagreement").at(d.name).get<double>()));
      row.push_back(number(rec.at("low_conf_fraction").at(d.name).get<double>()));
    }
    row.push_back(pack_labels(rec.at("labels")));
    row.emplace_back();
    out += csv::write_row(row);
  }
  return out;
}

CampaignId import_campaign(Service& service, std::string_view data, Format format,
                           const UserId& importer, const ImportOptions& options) {
  return format == Format::kJsonl ? import_jsonl(service, data, importer, options)
                                  : import_csv(service, data, importer, options);
}

MappedImportResult import_mapped_csv(Service& service, std::string_view csv_text,
                                     const Json& mapping, const UserId& importer) {
  const auto now = service.workspace().clock().now();
  Campaign campaign;
  campaign.name = required<std::string>(mapping, "campaign_name");
  if (auto dims = optional_field<Json>(mapping, "dimensions")) {
    const auto named = campaign_from_header(
        Json{{"name", campaign.name}, {"schema", {{"dimensions", *dims}}}, {"datasheet", Json::array()}},
        importer, now);
    campaign.schema = named.schema;
  } else {
    campaign.schema = damage_intent_schema(importer, now);
  }
  campaign.datasheet = default_datasheet(importer, now);
  campaign.created_by = importer;
  campaign.created_at = now;
  validate_campaign(campaign);

  auto records = csv::parse(csv_text);
  std::erase_if(records, [](const csv::Record& r) {
    return r.fields.size() == 1 && r.fields[0].empty();
  });
  if (records.empty()) parse_fail(1, "empty CSV");
  const auto& header = records[0].fields;
  auto col = [&](const std::string& name) -> std::size_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) fail(ErrorCode::kSchemaMismatch, "missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  };

  const auto c_ref = col(required<std::string>(mapping, "external_ref_column"));
  const auto ref_template = optional_field<std::string>(mapping, "external_ref_template");
  const auto content_col = optional_field<std::string>(mapping, "content_column");
  const auto added_at_col = optional_field<std::string>(mapping, "added_at_column");
  const auto labels_col = optional_field<std::string>(mapping, "labels_column");
  const auto primary_cols = required<std::map<std::string, std::string>>(mapping, "primary_columns");
  const auto value_map = optional_field<Json>(mapping, "value_map").value_or(Json::object());

  // Per dimension: accepted spellings for each choice.
  std::map<std::string, std::map<std::string, Choice>> spellings;
  for (const auto& d : campaign.schema.dimensions) {
    auto& m = spellings[d.name];
    m[d.positive_value] = Choice::kPositive;
    m[d.negative_value] = Choice::kNegative;
    m["positive"] = Choice::kPositive;
    m["negative"] = Choice::kNegative;
    if (value_map.contains(d.name)) {
      for (const auto& s : value_map[d.name].value("positive", Json::array())) {
        m[s.get<std::string>()] = Choice::kPositive;
      }
      for (const auto& s : value_map[d.name].value("negative", Json::array())) {
        m[s.get<std::string>()] = Choice::kNegative;
      }
    }
  }
  for (const auto& [dim, column] : primary_cols) {
    if (!campaign.schema.find(dim)) fail(ErrorCode::kSchemaMismatch, "unknown dimension '" + dim + "'");
    (void)col(column);
  }
  if (primary_cols.size() != campaign.schema.dimensions.size()) {
    fail(ErrorCode::kSchemaMismatch, "primary_columns must map every dimension");
  }
  auto to_choice = [&](const std::string& dim, const std::string& raw) -> std::optional<Choice> {
    const auto& m = spellings.at(dim);
    auto it = m.find(raw);
    if (it == m.end()) return std::nullopt;
    return it->second;
  };

  const UserId synthetic{"imported-primary"};
  MappedImportResult result;
  std::vector<ImportedEntity> entities;
  std::set<std::string> refs;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& r = records[i];
    auto skip = [&](const std::string& why) {
      ++result.skipped_rows;
      result.skipped_reasons.push_back("line " + std::to_string(r.line) + ": " + why);
    };
    if (r.fields.size() != header.size()) {
      skip("wrong field count");
      continue;
    }
    ImportedEntity e;
    e.line = r.line;
    const auto& raw_ref = r.fields[c_ref];
    if (raw_ref.empty()) {
      skip("empty external ref");
      continue;
    }
    e.external_ref = raw_ref;
    if (ref_template) {
      e.external_ref = *ref_template;
      if (auto pos = e.external_ref.find("{}"); pos != std::string::npos) {
        e.external_ref.replace(pos, 2, raw_ref);
      }
    }
    if (!refs.insert(e.external_ref).second) {
      skip("duplicate external ref '" + e.external_ref + "'");
      continue;
    }
    if (content_col) e.content_snapshot = r.fields[col(*content_col)];
    e.added_by = synthetic;
    e.added_at = added_at_col ? parse_int(r.fields[col(*added_at_col)], r.line, "added_at")
                              : now + static_cast<Timestamp>(i);
    ChoiceMap primary;
    bool ok = true;
    for (const auto& [dim, column] : primary_cols) {
      auto c = to_choice(dim, r.fields[col(column)]);
      if (!c) {
        skip("unmapped " + dim + " value '" + r.fields[col(column)] + "'");
        ok = false;
        break;
      }
      primary.emplace(dim, *c);
    }
    if (!ok) continue;
    e.primary = primary;

    if (labels_col && !r.fields[col(*labels_col)].empty()) {
      auto arr = Json::parse(r.fields[col(*labels_col)], nullptr, false);
      if (arr.is_discarded() || !arr.is_array()) {
        skip("labels cell is not a JSON array");
        continue;
      }
      for (const auto& jl : arr) {
        IndividualLabel l;
        l.author = UserId{jl.value("author", std::string("anonymous"))};
        l.created_at = l.updated_at = jl.value("created_at", e.added_at);
        const auto conf = jl.value("confidence", Json::object());
        for (const auto& d : campaign.schema.dimensions) {
          auto raw = jl.value("values", Json::object()).value(d.name, std::string());
          auto c = to_choice(d.name, raw);
          if (!c) {
            ok = false;
            break;
          }
          auto level = conf.is_object() ? conf.value(d.name, std::string("high")) : std::string("high");
          l.values.push_back(LabelValue{d.name, *c,
                                        parse_confidence(level).value_or(Confidence::kHigh)});
        }
        if (!ok) break;
        if (jl.contains("note") && jl["note"].is_string()) l.note = jl["note"].get<std::string>();
        e.labels.push_back(std::move(l));
      }
      if (!ok) {
        skip("unmapped value in labels cell");
        continue;
      }
    }
    if (e.labels.empty()) {
      IndividualLabel l;
      l.author = synthetic;
      l.created_at = l.updated_at = e.added_at;
      for (const auto& d : campaign.schema.dimensions) {
        l.values.push_back(LabelValue{d.name, primary.at(d.name), Confidence::kHigh});
      }
      e.labels.push_back(std::move(l));
    }
    try {
      check_entity(e, campaign.schema);
    } catch (const Error& err) {
      skip(err.what());
      continue;
    }
    entities.push_back(std::move(e));
  }
  result.imported = entities.size();
  result.campaign = commit_import(service, std::move(campaign), std::move(entities), importer);
  return result;
}

void register_appliers(Workspace& ws) {
  ws.register_applier("import_entity", [&ws](const Json& e) {
    auto entity = e.at("entity").get<Entity>();
    auto* c = ws.find_campaign(entity.campaign);
    c->entities.push_back(entity.id);
    c->by_ref.emplace(entity.external_ref, entity.id);
    auto& es = ws.insert_entity(entity);
    es.labels = e.at("labels").get<std::vector<IndividualLabel>>();
    if (!e.at("primary").is_null()) es.primary = e.at("primary").get<PrimaryLabel>();
    for (const auto& l : es.labels) es.last_activity = std::max(es.last_activity, l.updated_at);
  });
}

}  // namespace wikibench::store
