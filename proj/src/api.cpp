// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#include "wikibench/api.hpp"

#include <httplib.h>

#include <fstream>
#include <functional>
#include <set>
#include <shared_mutex>
#include <sstream>
#include <vector>

#include "wikibench/campaign_service.hpp"
#include "wikibench/eval_report.hpp"
#include "wikibench/label_engine.hpp"
#include "wikibench/store.hpp"

namespace wikibench::api {

// ---- adapters ------------------------------------------------------------

StaticAdapter::StaticAdapter(std::map<std::string, std::string> content)
    : content_(std::move(content)) {}

void StaticAdapter::add(std::string external_ref, std::string content) {
  std::lock_guard lock(mu_);
  content_[std::move(external_ref)] = std::move(content);
}

std::string StaticAdapter::fetch(const std::string& external_ref) {
  std::lock_guard lock(mu_);
  auto it = content_.find(external_ref);
  if (it == content_.end()) {
    fail(ErrorCode::kAdapterFetchFailed, "no content registered for '" + external_ref + "'");
  }
  return it->second;
}

namespace {

class NoAdapter final : public SourceAdapter {
 public:
  std::string name() const override { return "none"; }
  std::string fetch(const std::string& external_ref) override {
    fail(ErrorCode::kAdapterFetchFailed, "no source adapter configured for '" + external_ref + "'");
  }
};

}  // namespace

std::shared_ptr<SourceAdapter> make_adapter(const Config& config) {
  if (config.adapter == "static") return std::make_shared<StaticAdapter>(config.static_content);
  if (config.adapter == "none") return std::make_shared<NoAdapter>();
  fail(ErrorCode::kInvalidArgument, "unknown adapter '" + config.adapter + "'");
}

// ---- config --------------------------------------------------------------

Config config_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "config must be a JSON object");
  static const std::set<std::string> known{"listen_address", "port",       "storage_path",
                                           "fsync",          "adapter",    "static_content",
                                           "thresholds",     "export_salt", "pseudonymize"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) fail(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
  }
  Config c;
  try {
    c.listen_address = j.value("listen_address", c.listen_address);
    c.port = j.value("port", c.port);
    c.storage_path = j.value("storage_path", c.storage_path);
    c.fsync = j.value("fsync", c.fsync);
    c.adapter = j.value("adapter", c.adapter);
    if (j.contains("static_content")) {
      c.static_content = j["static_content"].get<std::map<std::string, std::string>>();
    }
    if (j.contains("thresholds")) c.thresholds = j["thresholds"].get<QuadrantThresholds>();
    c.export_salt = j.value("export_salt", c.export_salt);
    c.pseudonymize = j.value("pseudonymize", c.pseudonymize);
  } catch (const Json::exception& e) {
    fail(ErrorCode::kInvalidArgument, std::string("bad config: ") + e.what());
  }
  validate_thresholds(c.thresholds);
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kInvalidArgument, "cannot read config '" + path + "'");
  auto j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::kParseError, "config '" + path + "' is not valid JSON");
  return config_from_json(j);
}

namespace {

bool parse_bool(std::string_view s, std::string_view what) {
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no") return false;
  fail(ErrorCode::kInvalidArgument, std::string(what) + " must be a boolean");
}

std::size_t parse_size(const std::string& s, std::string_view what) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size() || s.starts_with('-')) throw std::invalid_argument("trailing");
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    fail(ErrorCode::kInvalidArgument, std::string(what) + " must be a non-negative integer");
  }
}

}  // namespace

void apply_env_overrides(Config& config, const std::function<const char*(const char*)>& getenv) {
  if (const char* v = getenv("WIKIBENCH_LISTEN_ADDRESS")) config.listen_address = v;
  if (const char* v = getenv("WIKIBENCH_PORT")) {
    config.port = static_cast<int>(parse_size(v, "WIKIBENCH_PORT"));
  }
  if (const char* v = getenv("WIKIBENCH_STORAGE_PATH")) config.storage_path = v;
  if (const char* v = getenv("WIKIBENCH_FSYNC")) config.fsync = parse_bool(v, "WIKIBENCH_FSYNC");
  if (const char* v = getenv("WIKIBENCH_ADAPTER")) config.adapter = v;
  if (const char* v = getenv("WIKIBENCH_EXPORT_SALT")) config.export_salt = v;
  if (const char* v = getenv("WIKIBENCH_PSEUDONYMIZE")) {
    config.pseudonymize = parse_bool(v, "WIKIBENCH_PSEUDONYMIZE");
  }
}

// ---- errors --------------------------------------------------------------

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kUnknownCampaign:
    case ErrorCode::kUnknownEntity:
    case ErrorCode::kUnknownUser:
    case ErrorCode::kUnknownSection:
    case ErrorCode::kUnknownScope:
    case ErrorCode::kUnknownParent:
    case ErrorCode::kUnknownDimension:
      return 404;
    case ErrorCode::kExcludedEntity:
      return 410;
    case ErrorCode::kSchemaMismatch:
    case ErrorCode::kInvalidSchema:
    case ErrorCode::kDegenerateLabels:
      return 422;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParseError:
      return 400;
    case ErrorCode::kRevisionConflict:
    case ErrorCode::kNoPrimaryYet:
    case ErrorCode::kDuplicateName:
    case ErrorCode::kDuplicateExternalRef:
    case ErrorCode::kAlreadyExcluded:
      return 409;
    case ErrorCode::kAuthRequired:
      return 401;
    case ErrorCode::kAdapterFetchFailed:
      return 502;
    case ErrorCode::kStorageError:
      return 500;
  }
  return 500;
}

Json error_body(const Error& e) {
  Json err{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  if (e.code() == ErrorCode::kStorageError) err["message"] = "storage failure";
  if (e.current_revision) err["current_revision"] = *e.current_revision;
  if (e.existing_id) err["existing_id"] = *e.existing_id;
  if (e.line) err["line"] = *e.line;
  return Json{{"ok", false}, {"error", std::move(err)}};
}

// ---- routing -------------------------------------------------------------

namespace {

Response json_response(int status, const Json& body) {
  return Response{status, "application/json", body.dump()};
}

Response ok(Json data) { return json_response(200, Json{{"ok", true}, {"data", std::move(data)}}); }

Response created(Json data) {
  return json_response(201, Json{{"ok", true}, {"data", std::move(data)}});
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < path.size()) {
    if (path[pos] == '/') {
      ++pos;
      continue;
    }
    auto end = path.find('/', pos);
    if (end == std::string_view::npos) end = path.size();
    out.emplace_back(path.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

struct Context {
  const Request& req;
  std::map<std::string, std::string> params;
  Service& service;
  SourceAdapter& adapter;
  const Config& config;

  const std::string& param(const std::string& name) const { return params.at(name); }

  std::optional<UserId> viewer() const {
    if (req.authorization.empty()) return std::nullopt;
    constexpr std::string_view kPrefix = "Bearer ";
    if (!req.authorization.starts_with(kPrefix)) {
      fail(ErrorCode::kAuthRequired, "expected a bearer token");
    }
    auto user = service.workspace().authenticate(req.authorization.substr(kPrefix.size()));
    if (!user) fail(ErrorCode::kAuthRequired, "invalid token");
    return user;
  }

  UserId user() const {
    auto u = viewer();
    if (!u) fail(ErrorCode::kAuthRequired, "authentication required");
    return *u;
  }

  Json body() const {
    if (req.body.empty()) return Json::object();
    auto j = Json::parse(req.body, nullptr, false);
    if (j.is_discarded()) fail(ErrorCode::kParseError, "request body is not valid JSON");
    if (!j.is_object()) fail(ErrorCode::kInvalidArgument, "request body must be a JSON object");
    return j;
  }

  std::optional<std::string> query(const std::string& name) const {
    auto it = req.query.find(name);
    if (it == req.query.end()) return std::nullopt;
    return it->second;
  }

  CampaignId campaign() const { return CampaignId{param("c")}; }

  /// Entity id from the path, checked to belong to the campaign.
  EntityId entity() const {
    const EntityId id{param("e")};
    const auto view = service.labels().get_entity_view(UserId{}, id);
    if (view.entity.campaign != campaign()) {
      fail(ErrorCode::kUnknownEntity,
           "entity '" + id.str() + "' is not in campaign '" + param("c") + "'");
    }
    return id;
  }
};

using Handler = std::function<Response(Context&)>;

struct Route {
  std::string method;
  std::vector<std::string> pattern;
  Handler handler;
};

/// Accepts {"name","positive_value","negative_value","definition"} as a
/// shorthand for a dimension with a single-revision definition.
LabelSchema schema_from_request(const Json& j, const UserId& author, Timestamp at) {
  LabelSchema schema;
  for (const auto& d : required<Json>(j, "dimensions")) {
    if (d.contains("definition_text")) {
      schema.dimensions.push_back(d.get<LabelDimension>());
      continue;
    }
    LabelDimension dim;
    dim.name = required<std::string>(d, "name");
    dim.positive_value = required<std::string>(d, "positive_value");
    dim.negative_value = required<std::string>(d, "negative_value");
    dim.definition_text.append(optional_field<std::string>(d, "definition").value_or(""), author,
                               at);
    schema.dimensions.push_back(std::move(dim));
  }
  return schema;
}

Datasheet datasheet_from_request(const Json& j, const UserId& author, Timestamp at) {
  Datasheet sheet;
  for (const auto& s : j) {
    if (s.contains("text") && s["text"].is_string()) {
      DatasheetSection section{required<std::string>(s, "name"), {}};
      section.text.append(s["text"].get<std::string>(), author, at);
      sheet.sections.push_back(std::move(section));
    } else {
      sheet.sections.push_back(s.get<DatasheetSection>());
    }
  }
  return sheet;
}

eval::PredictionSet prediction_from_request(const Json& j) {
  if (j.contains("jsonl")) return eval::parse_predictions_jsonl(required<std::string>(j, "jsonl"));
  if (j.contains("csv")) {
    return eval::parse_predictions_csv(required<std::string>(j, "csv"),
                                       required<std::string>(j, "model"));
  }
  eval::PredictionSet set;
  set.model = required<std::string>(j, "model");
  set.dimension = optional_field<std::string>(j, "dimension");
  set.positive_means = optional_field<std::string>(j, "positive_means");
  const auto scores = required<Json>(j, "scores");
  for (const auto& [ref, score] : scores.items()) {
    if (!score.is_number()) fail(ErrorCode::kInvalidArgument, "score for '" + ref + "' is not a number");
    const double s = score.get<double>();
    if (!(s >= 0.0 && s <= 1.0)) {
      fail(ErrorCode::kInvalidArgument, "score for '" + ref + "' is outside [0, 1]");
    }
    set.scores.emplace(ref, s);
  }
  return set;
}

Json primary_payload(const std::optional<PrimaryLabel>& primary) {
  return Json{{"primary", primary ? Json(*primary) : Json(nullptr)},
              {"requires_acknowledgement", true},
              {"notice", std::string(kBoldEditNotice)}};
}

std::vector<Route> build_routes() {
  std::vector<Route> r;
  auto add = [&](std::string method, std::string_view pattern, Handler h) {
    r.push_back(Route{std::move(method), split_path(pattern), std::move(h)});
  };

  // Users.
  add("POST", "/users", [](Context& ctx) {
    const auto body = ctx.body();
    const UserId id{required<std::string>(body, "user")};
    if (id.empty()) fail(ErrorCode::kInvalidArgument, "user id is empty");
    bool active = false;
    {
      std::shared_lock lock(ctx.service.workspace().registry_mutex());
      const auto* existing = ctx.service.workspace().find_user(id);
      active = existing && !existing->imported;
    }
    // Rotating an active member's token requires that member's token.
    if (active && ctx.user() != id) {
      fail(ErrorCode::kAuthRequired, "token of '" + id.str() + "' required");
    }
    const auto token = ctx.service.workspace().register_user(
        id, optional_field<std::string>(body, "display_name").value_or(id.str()));
    return created(Json{{"user", id}, {"token", token}});
  });
  add("GET", "/me", [](Context& ctx) {
    const auto user = ctx.user();
    std::string display_name = user.str();
    {
      std::shared_lock lock(ctx.service.workspace().registry_mutex());
      if (const auto* rec = ctx.service.workspace().find_user(user)) display_name = rec->display_name;
    }
    return ok(Json{{"user", user},
                   {"display_name", display_name},
                   {"unread_notifications", ctx.service.workspace().inbox().unread_count(user)}});
  });

  // Campaigns.
  add("GET", "/campaigns", [](Context& ctx) {
    return ok(Json(ctx.service.campaigns().list_campaigns()));
  });
  add("POST", "/campaigns", [](Context& ctx) {
    const auto user = ctx.user();
    const auto body = ctx.body();
    const auto at = ctx.service.workspace().clock().now();
    auto schema = body.contains("schema") ? schema_from_request(body["schema"], user, at)
                                          : damage_intent_schema(user, at);
    auto sheet = body.contains("datasheet") ? datasheet_from_request(body["datasheet"], user, at)
                                            : default_datasheet(user, at);
    const auto thresholds =
        optional_field<QuadrantThresholds>(body, "thresholds").value_or(ctx.config.thresholds);
    const auto id = ctx.service.campaigns().create_campaign(
        user, required<std::string>(body, "name"), std::move(schema), std::move(sheet), thresholds);
    return created(Json(ctx.service.campaigns().get_campaign(id)));
  });
  add("POST", "/campaigns/import", [](Context& ctx) {
    const auto user = ctx.user();
    const auto format = store::parse_format(ctx.query("format").value_or("jsonl"));
    if (!format) fail(ErrorCode::kInvalidArgument, "format must be jsonl or csv");
    store::ImportOptions options;
    options.name = ctx.query("name");
    const auto id = store::import_campaign(ctx.service, ctx.req.body, *format, user, options);
    return created(Json(ctx.service.campaigns().get_campaign(id)));
  });
  add("POST", "/campaigns/import-mapped", [](Context& ctx) {
    const auto user = ctx.user();
    const auto body = ctx.body();
    const auto result = store::import_mapped_csv(ctx.service, required<std::string>(body, "csv"),
                                                 required<Json>(body, "mapping"), user);
    return created(Json{{"campaign", result.campaign},
                        {"imported", result.imported},
                        {"skipped_rows", result.skipped_rows},
                        {"skipped_reasons", result.skipped_reasons}});
  });
  add("GET", "/campaigns/{c}", [](Context& ctx) {
    return ok(Json(ctx.service.campaigns().get_campaign(ctx.campaign())));
  });
  add("PUT", "/campaigns/{c}/thresholds", [](Context& ctx) {
    const auto user = ctx.user();
    const auto t = ctx.body().get<QuadrantThresholds>();
    ctx.service.campaigns().set_thresholds(ctx.campaign(), t, user);
    return ok(Json(ctx.service.campaigns().get_campaign(ctx.campaign()).thresholds));
  });

  // Entities.
  add("GET", "/campaigns/{c}/entities", [](Context& ctx) {
    const bool include_excluded =
        parse_bool(ctx.query("include_excluded").value_or("false"), "include_excluded");
    Json out = Json::array();
    for (const auto& snap : ctx.service.campaigns().snapshot(ctx.campaign(), include_excluded)) {
      out.push_back(Json{{"entity", snap.entity},
                         {"n_labels", snap.labels.size()},
                         {"primary", snap.primary ? Json(snap.primary->values) : Json(nullptr)},
                         {"has_discussion", snap.has_discussion}});
    }
    return ok(std::move(out));
  });
  add("POST", "/campaigns/{c}/entities", [](Context& ctx) {
    const auto user = ctx.user();
    const auto body = ctx.body();
    const auto ref = required<std::string>(body, "external_ref");
    auto content = optional_field<std::string>(body, "content_snapshot");
    if (!content) {
      ctx.service.campaigns().get_campaign(ctx.campaign());
      if (auto existing = ctx.service.campaigns().find_entity_by_ref(ctx.campaign(), ref)) {
        Error err(ErrorCode::kDuplicateExternalRef, "external_ref '" + ref + "' already present");
        err.existing_id = existing->str();
        throw err;
      }
      content = ctx.adapter.fetch(ref);
    }
    const auto id = ctx.service.campaigns().add_entity(ctx.campaign(), ref, *content, user);
    return created(Json(ctx.service.labels().get_entity_view(user, id)));
  });
  add("GET", "/campaigns/{c}/entities/{e}", [](Context& ctx) {
    const auto viewer = ctx.viewer().value_or(UserId{});
    return ok(Json(ctx.service.labels().get_entity_view(viewer, ctx.entity())));
  });
  add("POST", "/campaigns/{c}/entities/{e}/labels", [](Context& ctx) {
    const auto user = ctx.user();
    const auto body = ctx.body();
    const auto outcome = ctx.service.labels().submit_individual_label(
        user, ctx.entity(), required<std::vector<LabelValue>>(body, "values"),
        optional_field<std::string>(body, "note"));
    return ok(Json(outcome));
  });
  add("GET", "/campaigns/{c}/entities/{e}/primary", [](Context& ctx) {
    return ok(primary_payload(ctx.service.labels().primary_label(ctx.entity())));
  });
  add("PUT", "/campaigns/{c}/entities/{e}/primary", [](Context& ctx) {
    const auto user = ctx.user();
    const auto body = ctx.body();
    if (!optional_field<bool>(body, "acknowledged").value_or(false)) {
      fail(ErrorCode::kInvalidArgument, "the edit notice must be acknowledged");
    }
    const auto primary = ctx.service.labels().edit_primary_label(
        user, ctx.entity(), required<ChoiceMap>(body, "values"),
        required<std::uint64_t>(body, "base_revision"), optional_field<std::string>(body, "rationale"));
    return ok(Json(primary));
  });
  add("POST", "/campaigns/{c}/entities/{e}/exclude", [](Context& ctx) {
    const auto user = ctx.user();
    const auto body = ctx.body();
    const auto result = ctx.service.campaigns().exclude_entity(
        ctx.campaign(), ctx.entity(), user, required<std::string>(body, "reason"));
    Json data{{"excluded", true}};
    if (result == ExcludeResult::kAlreadyExcluded) {
      data["warning"] = std::string(to_string(ErrorCode::kAlreadyExcluded));
    }
    return ok(std::move(data));
  });
  add("GET", "/campaigns/{c}/entities/{e}/talk", [](Context& ctx) {
    return ok(Json(ctx.service.campaigns().thread(ThreadScope{ctx.campaign(), ctx.entity()})));
  });
  add("POST", "/campaigns/{c}/entities/{e}/talk", [](Context& ctx) {
    const auto user = ctx.user();
    const auto body = ctx.body();
    const auto id = ctx.service.campaigns().post_to_thread(
        ThreadScope{ctx.campaign(), ctx.entity()}, required<std::string>(body, "topic"),
        required<std::string>(body, "body"), user, optional_field<PostId>(body, "parent"));
    return created(Json{{"post", id}});
  });

  // Campaign-level views.
  add("GET", "/campaigns/{c}/talk", [](Context& ctx) {
    return ok(Json(ctx.service.campaigns().thread(ThreadScope{ctx.campaign(), std::nullopt})));
  });
  add("POST", "/campaigns/{c}/talk", [](Context& ctx) {
    const auto user = ctx.user();
    const auto body = ctx.body();
    const auto id = ctx.service.campaigns().post_to_thread(
        ThreadScope{ctx.campaign(), std::nullopt}, required<std::string>(body, "topic"),
        required<std::string>(body, "body"), user, optional_field<PostId>(body, "parent"));
    return created(Json{{"post", id}});
  });
  add("GET", "/campaigns/{c}/table", [](Context& ctx) {
    const auto viewer = ctx.viewer().value_or(UserId{});
    const auto sort_name = ctx.query("sort").value_or("fewest_labels");
    const auto sort = parse_sort_mode(sort_name);
    if (!sort) fail(ErrorCode::kInvalidArgument, "unknown sort '" + sort_name + "'");
    const auto page = parse_size(ctx.query("page").value_or("0"), "page");
    const auto page_size =
        parse_size(ctx.query("page_size").value_or(std::to_string(kDefaultPageSize)), "page_size");
    const auto rows =
        ctx.service.campaigns().list_table(ctx.campaign(), viewer, *sort, page, page_size);
    return ok(Json{{"sort", sort_name}, {"page", page}, {"page_size", page_size}, {"rows", rows}});
  });
  add("GET", "/campaigns/{c}/stats", [](Context& ctx) {
    return ok(Json(ctx.service.campaigns().campaign_stats(ctx.campaign())));
  });
  add("GET", "/campaigns/{c}/datasheet", [](Context& ctx) {
    return ok(Json(ctx.service.campaigns().get_campaign(ctx.campaign()).datasheet));
  });
  add("POST", "/campaigns/{c}/datasheet", [](Context& ctx) {
    const auto user = ctx.user();
    const auto body = ctx.body();
    const auto rev = ctx.service.campaigns().add_datasheet_section(
        ctx.campaign(), required<std::string>(body, "section"), required<std::string>(body, "text"),
        user);
    return created(Json(rev));
  });
  add("GET", "/campaigns/{c}/datasheet/{s}", [](Context& ctx) {
    return ok(Json(ctx.service.campaigns().datasheet_history(ctx.campaign(), ctx.param("s"))));
  });
  add("PUT", "/campaigns/{c}/datasheet/{s}", [](Context& ctx) {
    const auto user = ctx.user();
    const auto rev = ctx.service.campaigns().edit_datasheet_section(
        ctx.campaign(), ctx.param("s"), required<std::string>(ctx.body(), "text"), user);
    return ok(Json(rev));
  });
  add("PUT", "/campaigns/{c}/definitions/{d}", [](Context& ctx) {
    const auto user = ctx.user();
    const auto rev = ctx.service.campaigns().edit_dimension_definition(
        ctx.campaign(), ctx.param("d"), required<std::string>(ctx.body(), "text"), user);
    return ok(Json(rev));
  });
  add("GET", "/campaigns/{c}/export", [](Context& ctx) {
    const auto format = store::parse_format(ctx.query("format").value_or("jsonl"));
    if (!format) fail(ErrorCode::kInvalidArgument, "format must be jsonl or csv");
    store::ExportOptions options;
    options.salt = ctx.config.export_salt;
    options.pseudonymize = ctx.config.pseudonymize;
    if (auto p = ctx.query("pseudonymize")) options.pseudonymize = parse_bool(*p, "pseudonymize");
    auto body = store::export_campaign(ctx.service, ctx.campaign(), *format, options);
    return Response{200, *format == store::Format::kCsv ? "text/csv" : "application/x-ndjson",
                    std::move(body)};
  });
  add("POST", "/campaigns/{c}/evaluate", [](Context& ctx) {
    const auto body = ctx.body();
    std::vector<eval::PredictionSet> sets;
    for (const auto& p : required<Json>(body, "predictions")) {
      sets.push_back(prediction_from_request(p));
    }
    eval::CompareOptions options;
    options.weighted = optional_field<bool>(body, "weighted").value_or(false);
    const auto cmp = eval::compare_models(ctx.service, ctx.campaign(),
                                          required<std::string>(body, "dimension"), sets, options);
    Json data = cmp;
    data["text"] = eval::text_table(cmp);
    return ok(std::move(data));
  });

  // Notifications.
  add("GET", "/notifications", [](Context& ctx) {
    const auto user = ctx.user();
    const bool unread = parse_bool(ctx.query("unread").value_or("false"), "unread");
    return ok(Json(ctx.service.labels().list_notifications(user, unread)));
  });
  add("POST", "/notifications/read", [](Context& ctx) {
    const auto user = ctx.user();
    const auto ids = required<std::vector<NotificationId>>(ctx.body(), "ids");
    return ok(Json{{"changed", ctx.service.labels().mark_notifications_read(user, ids)}});
  });

  // In-flow labeling.
  add("POST", "/quick-label", [](Context& ctx) {
    const auto user = ctx.user();
    const auto body = ctx.body();
    const CampaignId campaign{required<std::string>(body, "campaign")};
    const auto ref = required<std::string>(body, "external_ref");
    auto values = required<std::vector<LabelValue>>(body, "values");
    auto note = optional_field<std::string>(body, "note");
    ctx.service.campaigns().get_campaign(campaign);
    std::string content;
    if (!ctx.service.campaigns().find_entity_by_ref(campaign, ref)) content = ctx.adapter.fetch(ref);
    const auto outcome = ctx.service.labels().submit_to_new_entity(
        campaign, ref, std::move(content), user, std::move(values), std::move(note));
    return ok(Json(outcome));
  });
  return r;
}

const std::vector<Route>& routes() {
  static const auto table = build_routes();
  return table;
}

}  // namespace

Api::Api(Service& service, std::shared_ptr<SourceAdapter> adapter, Config config)
    : service_(service), adapter_(std::move(adapter)), config_(std::move(config)) {
  if (!adapter_) adapter_ = make_adapter(config_);
}

Response Api::handle(const Request& request) {
  const auto segments = split_path(request.path);
  bool path_matched = false;
  for (const auto& route : routes()) {
    if (route.pattern.size() != segments.size()) continue;
    std::map<std::string, std::string> params;
    bool match = true;
    for (std::size_t i = 0; i < segments.size() && match; ++i) {
      const auto& p = route.pattern[i];
      if (p.size() > 2 && p.front() == '{' && p.back() == '}') {
        params[p.substr(1, p.size() - 2)] = segments[i];
      } else {
        match = p == segments[i];
      }
    }
    if (!match) continue;
    path_matched = true;
    if (route.method != request.method) continue;
    Context ctx{request, std::move(params), service_, *adapter_, config_};
    try {
      return route.handler(ctx);
    } catch (const Error& e) {
      return json_response(http_status(e.code()), error_body(e));
    } catch (const Json::exception& e) {
      return json_response(400, error_body(Error(ErrorCode::kInvalidArgument, e.what())));
    } catch (const std::exception&) {
      return json_response(
          500, Json{{"ok", false}, {"error", {{"code", "Internal"}, {"message", "internal error"}}}});
    }
  }
  if (path_matched) {
    return json_response(
        405,
        Json{{"ok", false},
             {"error", {{"code", "MethodNotAllowed"}, {"message", "method not allowed"}}}});
  }
  return json_response(
      404, Json{{"ok", false}, {"error", {{"code", "NotFound"}, {"message", "no such endpoint"}}}});
}

// ---- HTTP transport ------------------------------------------------------

HttpServer::HttpServer(Api& api, std::string host, int port)
    : api_(api), host_(std::move(host)), port_(port), server_(std::make_unique<httplib::Server>()) {
  auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
    Request r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.query.emplace(k, v);
    r.authorization = req.get_header_value("Authorization");
    r.body = req.body;
    auto out = api_.handle(r);
    res.status = out.status;
    res.set_content(std::move(out.body), out.content_type);
  };
  server_->Get(".*", dispatch);
  server_->Post(".*", dispatch);
  server_->Put(".*", dispatch);
  server_->Delete(".*", dispatch);
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::bind() {
  if (port_ == 0) {
    port_ = server_->bind_to_any_port(host_);
  } else if (!server_->bind_to_port(host_, port_)) {
    port_ = -1;
  }
  if (port_ < 0) {
    fail(ErrorCode::kInvalidArgument, "cannot listen on " + host_);
  }
}

int HttpServer::start() {
  bind();
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void HttpServer::run() {
  bind();
  server_->listen_after_bind();
}

void HttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace wikibench::api
