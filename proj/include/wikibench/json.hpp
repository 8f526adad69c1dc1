// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

/// \file
/// Canonical JSON shape of the domain types. Field names are snake_case and
/// match the C++ members, except revision/post times which serialize as
/// "timestamp". Malformed input raises Error{kInvalidArgument}.

#include <json.hpp>

#include "wikibench/metrics.hpp"
#include "wikibench/types.hpp"

namespace wikibench {

using Json = nlohmann::json;

template <typename Tag>
void to_json(Json& j, const StrongId<Tag>& id) {
  j = id.str();
}
template <typename Tag>
void from_json(const Json& j, StrongId<Tag>& id) {
  if (!j.is_string()) throw Error(ErrorCode::kInvalidArgument, "id must be a string");
  id = StrongId<Tag>(j.get<std::string>());
}

void to_json(Json& j, Choice c);
void from_json(const Json& j, Choice& c);
void to_json(Json& j, Confidence c);
void from_json(const Json& j, Confidence& c);
void to_json(Json& j, Quadrant q);

void to_json(Json& j, const LabelValue& v);
void from_json(const Json& j, LabelValue& v);
void to_json(Json& j, const TextRevision& r);
void from_json(const Json& j, TextRevision& r);
void to_json(Json& j, const RevisionedText& t);
void from_json(const Json& j, RevisionedText& t);
void to_json(Json& j, const LabelDimension& d);
void from_json(const Json& j, LabelDimension& d);
void to_json(Json& j, const LabelSchema& s);
void from_json(const Json& j, LabelSchema& s);
void to_json(Json& j, const ChoiceMap& m);
void from_json(const Json& j, ChoiceMap& m);
void to_json(Json& j, const IndividualLabel& l);
void from_json(const Json& j, IndividualLabel& l);
void to_json(Json& j, const PrimaryRevision& r);
void from_json(const Json& j, PrimaryRevision& r);
void to_json(Json& j, const PrimaryLabel& p);
void from_json(const Json& j, PrimaryLabel& p);
void to_json(Json& j, const Entity& e);
void from_json(const Json& j, Entity& e);
void to_json(Json& j, const Post& p);
void from_json(const Json& j, Post& p);
void to_json(Json& j, const Topic& t);
void from_json(const Json& j, Topic& t);
void to_json(Json& j, const ThreadScope& s);
void to_json(Json& j, const TalkThread& t);
void to_json(Json& j, const DatasheetSection& s);
void from_json(const Json& j, DatasheetSection& s);
void to_json(Json& j, const Datasheet& d);
void from_json(const Json& j, Datasheet& d);
void to_json(Json& j, const QuadrantThresholds& t);
void from_json(const Json& j, QuadrantThresholds& t);
void to_json(Json& j, const Campaign& c);
void from_json(const Json& j, Campaign& c);
void to_json(Json& j, const Notification& n);

namespace metrics {
void to_json(Json& j, const DimensionStats& s);
void to_json(Json& j, const EntityStats& s);
void to_json(Json& j, const ChoiceComposition& c);
void to_json(Json& j, const CampaignStats& s);
}  // namespace metrics

/// Reads a required member, converting nlohmann errors into Error.
template <typename T>
T required(const Json& j, std::string_view key) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(ErrorCode::kInvalidArgument, "missing field '" + std::string(key) + "'");
  }
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                "field '" + std::string(key) + "': " + e.what());
  }
}

template <typename T>
std::optional<T> optional_field(const Json& j, std::string_view key) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "expected a JSON object");
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                "field '" + std::string(key) + "': " + e.what());
  }
}

}  // namespace wikibench
