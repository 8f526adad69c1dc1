// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

/// \file
/// Dataset export and import.
///
/// JSONL: a header line {"record":"header", "format":"wikibench-export",
/// "version":1, "campaign":{name, schema, datasheet, thresholds},
/// "pseudonymized":bool}, then one ExportRecord per included entity.
///
/// CSV: mandatory header row, then one row with record=campaign whose
/// "meta" cell holds the same campaign JSON, then one row per entity. Per
/// dimension D there are columns "primary:D", "disagreement:D" and
/// "low_conf_fraction:D". The "labels" column packs individual labels:
///
///     label   := author ';' created_at ';' updated_at ';' values [';' note]
///     values  := dim '=' choice '/' confidence (',' dim '=' choice '/' confidence)*
///     labels  := label ('|' label)*
///
/// with '\' escaping any of \ | ; , = / inside author, dim and note. A label
/// without a note has four parts; an empty note has five.
///
/// Records are ordered by added_at, then entity id, and numbers use the
/// shortest round-trip form, so identical state gives identical bytes.
/// Datasheet and definition histories export their current text only.

#include <optional>
#include <string>
#include <string_view>

#include "wikibench/json.hpp"
#include "wikibench/service.hpp"

namespace wikibench::store {

enum class Format { kJsonl, kCsv };

std::string_view to_string(Format f) noexcept;
std::optional<Format> parse_format(std::string_view s) noexcept;

struct ExportOptions {
  bool pseudonymize = true;
  std::string salt;
};

/// Stable per-campaign pseudonym: "u-" + 16 hex digits of a salted SHA-256.
std::string pseudonym(std::string_view salt, std::string_view campaign_name,
                      const UserId& user);

/// Export record of one entity as JSON (the JSONL line without newline).
Json export_record(const metrics::EntitySnapshot& snap, const Campaign& campaign,
                   const std::function<std::string(const UserId&)>& author_name);

std::string export_campaign(const Service& service, const CampaignId& campaign, Format format,
                            const ExportOptions& options = {});

struct ImportOptions {
  /// Replaces the campaign name from the header.
  std::optional<std::string> name;
};

/// Creates a new campaign from an export. All of it lands in one log
/// record, so an import is either fully visible or absent after a crash.
CampaignId import_campaign(Service& service, std::string_view data, Format format,
                           const UserId& importer, const ImportOptions& options = {});

struct MappedImportResult {
  CampaignId campaign;
  std::size_t imported = 0;
  std::size_t skipped_rows = 0;
  std::vector<std::string> skipped_reasons;
};

/// Imports an arbitrary CSV using a column mapping (see README).
MappedImportResult import_mapped_csv(Service& service, std::string_view csv_text,
                                     const Json& mapping, const UserId& importer);

/// Registers the appliers for import events. Service calls this.
void register_appliers(Workspace& ws);

}  // namespace wikibench::store
