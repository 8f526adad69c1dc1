// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "support/fixtures.hpp"
#include "wikibench/csv.hpp"
#include "wikibench/store.hpp"

namespace wikibench {
namespace {

using store::Format;
using testing::choices;
using testing::values;

constexpr Choice P = Choice::kPositive;
constexpr Choice N = Choice::kNegative;
constexpr Confidence L = Confidence::kLow;
constexpr Confidence H = Confidence::kHigh;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kStorageError;
}

/// A campaign with awkward text, notes, edits, an exclusion and an
/// unlabeled entity.
void populate(testing::Harness& h) {
  const auto a = h.user("alice");
  const auto b = h.user("bob|;,=/\\");
  const auto e1 = h.campaigns().add_entity(h.campaign, "diff/1", "line one\nline \"two\", 3", a);
  const auto e2 = h.campaigns().add_entity(h.campaign, "diff/2;odd|ref", "", b);
  const auto e3 = h.add("diff/3");
  h.add("diff/4");
  h.labels().submit_individual_label(a, e1, values(P, H, N, L), std::string("note, with | pipes; and = signs"));
  h.labels().submit_individual_label(b, e1, values(N, L, N, H));
  h.labels().edit_primary_label(b, e1, choices(N, N), 1);
  h.labels().submit_individual_label(b, e2, values(P, P));
  h.labels().submit_individual_label(a, e3, values(N, N));
  h.campaigns().exclude_entity(h.campaign, e3, a, "suppressed");
  h.campaigns().edit_datasheet_section(h.campaign, Datasheet::kDataStatement, "Drawn from \"recent\" edits,\nsampled.", a);
}

std::vector<Json> lines(const std::string& jsonl) {
  std::vector<Json> out;
  std::istringstream in(jsonl);
  for (std::string line; std::getline(in, line);) out.push_back(Json::parse(line));
  return out;
}

TEST(Pseudonym, StableSaltedAndCampaignScoped) {
  const UserId u{"alice"};
  const auto p = store::pseudonym("salt", "edits", u);
  EXPECT_EQ(p.size(), 18u);
  EXPECT_EQ(p.substr(0, 2), "u-");
  EXPECT_EQ(p, store::pseudonym("salt", "edits", u));
  EXPECT_NE(p, store::pseudonym("pepper", "edits", u));
  EXPECT_NE(p, store::pseudonym("salt", "other", u));
  EXPECT_NE(p, store::pseudonym("salt", "edits", UserId{"bob"}));
  const auto expected = "u-" + sha256_hex(std::string("salt") + '\0' + "edits" + '\0' + "alice").substr(0, 16);
  EXPECT_EQ(p, expected);
}

TEST(Export, JsonlContent) {
  testing::Harness h;
  populate(h);
  const auto out = store::export_campaign(*h.service, h.campaign, Format::kJsonl,
                                          {.pseudonymize = false, .salt = ""});
  const auto rows = lines(out);
  ASSERT_EQ(rows.size(), 4u);  // header + three included entities
  EXPECT_EQ(rows[0].at("record"), "header");
  EXPECT_EQ(rows[0].at("campaign").at("name"), "edits");
  EXPECT_EQ(rows[1].at("external_ref"), "diff/1");
  EXPECT_EQ(rows[1].at("primary"), Json(choices(N, N)));
  EXPECT_EQ(rows[1].at("n_labels"), 2);
  EXPECT_DOUBLE_EQ(rows[1].at("disagreement").at("damage").get<double>(), 0.75);
  EXPECT_DOUBLE_EQ(rows[1].at("low_conf_fraction").at("intent").get<double>(), 0.5);
  EXPECT_EQ(rows[1].at("labels")[0].at("author"), "alice");
  EXPECT_TRUE(rows[3].at("primary").is_null());
  EXPECT_EQ(rows[3].at("labels").size(), 0u);
  for (const auto& r : rows) EXPECT_NE(r.value("external_ref", ""), "diff/3");
  EXPECT_NE(rows[0].dump().find("suppressed"), std::string::npos);
}

TEST(Export, PseudonymizesAuthors) {
  testing::Harness h;
  populate(h);
  const auto out = store::export_campaign(*h.service, h.campaign, Format::kJsonl,
                                          {.pseudonymize = true, .salt = "s"});
  EXPECT_EQ(out.find("alice"), std::string::npos);
  EXPECT_NE(out.find(store::pseudonym("s", "edits", UserId{"alice"})), std::string::npos);
}

TEST(Export, DeterministicAcrossCalls) {
  testing::Harness h;
  populate(h);
  for (auto f : {Format::kJsonl, Format::kCsv}) {
    EXPECT_EQ(store::export_campaign(*h.service, h.campaign, f, {.pseudonymize = true, .salt = "k"}),
              store::export_campaign(*h.service, h.campaign, f, {.pseudonymize = true, .salt = "k"}));
  }
}

TEST(Export, CsvEscapingSurvivesParser) {
  testing::Harness h;
  populate(h);
  const auto out = store::export_campaign(*h.service, h.campaign, Format::kCsv, {.pseudonymize = false});
  const auto records = csv::parse(out);
  ASSERT_EQ(records.size(), 5u);  // columns, meta, three entities
  EXPECT_EQ(records[1].fields[0], "campaign");
  EXPECT_EQ(records[2].fields[2], "line one\nline \"two\", 3");
  EXPECT_EQ(records[3].fields[1], "diff/2;odd|ref");
}

class RoundTrip : public ::testing::TestWithParam<std::tuple<Format, bool>> {};

TEST_P(RoundTrip, ReimportPreservesContentAndReachesFixpoint) {
  const auto [format, pseudo] = GetParam();
  const store::ExportOptions opts{.pseudonymize = pseudo, .salt = "salt"};
  testing::Harness h;
  populate(h);
  const auto first = store::export_campaign(*h.service, h.campaign, format, opts);

  testing::Harness target(std::nullopt, "unused");
  const auto imported = store::import_campaign(*target.service, first, format, target.owner);
  const auto second = store::export_campaign(*target.service, imported, format, opts);
  EXPECT_EQ(first, second);

  testing::Harness third(std::nullopt, "unused");
  const auto again = store::import_campaign(*third.service, second, format, third.owner);
  EXPECT_EQ(store::export_campaign(*third.service, again, format, opts), second);

  const auto snaps = target.campaigns().snapshot(imported, true);
  ASSERT_EQ(snaps.size(), 3u);
  EXPECT_EQ(snaps[0].primary->values, choices(N, N));
  EXPECT_EQ(snaps[0].labels.size(), 2u);
  EXPECT_EQ(snaps[0].labels[0].note, "note, with | pipes; and = signs");
  EXPECT_FALSE(snaps[2].primary);
  const auto c = target.campaigns().get_campaign(imported);
  EXPECT_EQ(c.datasheet.find(Datasheet::kDataStatement)->text.current(),
            "Drawn from \"recent\" edits,\nsampled.");
}

INSTANTIATE_TEST_SUITE_P(Formats, RoundTrip,
                         ::testing::Combine(::testing::Values(Format::kJsonl, Format::kCsv),
                                            ::testing::Bool()),
                         [](const auto& info) {
                           return std::string(store::to_string(std::get<0>(info.param))) +
                                  (std::get<1>(info.param) ? "Pseudonymized" : "Plain");
                         });

TEST(Import, NameOverrideAndDuplicate) {
  testing::Harness h;
  populate(h);
  const auto out = store::export_campaign(*h.service, h.campaign, Format::kJsonl);
  EXPECT_EQ(code_of([&] { store::import_campaign(*h.service, out, Format::kJsonl, h.owner); }),
            ErrorCode::kDuplicateName);
  const auto copy = store::import_campaign(*h.service, out, Format::kJsonl, h.owner, {.name = "copy"});
  EXPECT_EQ(h.campaigns().get_campaign(copy).name, "copy");
  EXPECT_EQ(code_of([&] { store::import_campaign(*h.service, out, Format::kJsonl, UserId{"ghost"}, {.name = "z"}); }),
            ErrorCode::kUnknownUser);
}

TEST(Import, ParseErrorsCarryLine) {
  testing::Harness h;
  populate(h);
  auto out = store::export_campaign(*h.service, h.campaign, Format::kJsonl);
  const auto second_nl = out.find('\n', out.find('\n') + 1);
  out.insert(second_nl + 1, "{not json\n");
  try {
    store::import_campaign(*h.service, out, Format::kJsonl, h.owner, {.name = "bad"});
    FAIL() << "accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_EQ(e.line, 3u);
  }
  EXPECT_FALSE(h.campaigns().find_campaign_by_name("bad"));
}

TEST(Import, SchemaMismatches) {
  testing::Harness h;
  populate(h);
  EXPECT_EQ(code_of([&] {
              store::import_campaign(*h.service, "{\"record\":\"header\",\"format\":\"other\"}\n",
                                     Format::kJsonl, h.owner);
            }),
            ErrorCode::kSchemaMismatch);

  auto jsonl = lines(store::export_campaign(*h.service, h.campaign, Format::kJsonl));
  jsonl[1]["labels"][0]["values"].erase(1);
  std::string broken;
  for (const auto& j : jsonl) broken += j.dump() + "\n";
  EXPECT_EQ(code_of([&] { store::import_campaign(*h.service, broken, Format::kJsonl, h.owner, {.name = "b"}); }),
            ErrorCode::kSchemaMismatch);

  auto csv_text = store::export_campaign(*h.service, h.campaign, Format::kCsv);
  csv_text.replace(csv_text.find("primary:damage"), 14, "primary:harm");
  EXPECT_EQ(code_of([&] { store::import_campaign(*h.service, csv_text, Format::kCsv, h.owner, {.name = "c"}); }),
            ErrorCode::kSchemaMismatch);
}

TEST(Import, RejectsDuplicateRefs) {
  testing::Harness h;
  populate(h);
  auto jsonl = lines(store::export_campaign(*h.service, h.campaign, Format::kJsonl));
  jsonl.push_back(jsonl[1]);
  std::string dup;
  for (const auto& j : jsonl) dup += j.dump() + "\n";
  EXPECT_THROW(store::import_campaign(*h.service, dup, Format::kJsonl, h.owner, {.name = "d"}), Error);
  EXPECT_FALSE(h.campaigns().find_campaign_by_name("d"));
}

TEST(Import, SurvivesRestart) {
  testing::TempDir dir;
  std::string exported;
  {
    testing::Harness h;
    populate(h);
    exported = store::export_campaign(*h.service, h.campaign, Format::kJsonl, {.pseudonymize = false});
  }
  {
    testing::Harness h(dir / "log.jsonl", "seed");
    store::import_campaign(*h.service, exported, Format::kJsonl, h.owner);
  }
  testing::Harness h(dir / "log.jsonl", "seed");
  const auto id = h.campaigns().find_campaign_by_name("edits");
  ASSERT_TRUE(id);
  EXPECT_EQ(store::export_campaign(*h.service, *id, Format::kJsonl, {.pseudonymize = false}), exported);
}

const char* kMappedCsv =
    "rev_id,comment,when,damaging,goodfaith,annotations\n"
    "101,blanked page,1000,true,false,\n"
    "102,fixed typo,1001,false,true,\"[{\"\"author\"\":\"\"x\"\",\"\"values\"\":{\"\"damage\"\":\"\"positive\"\",\"\"intent\"\":\"\"negative\"\"}}]\"\n"
    "103,odd,1002,maybe,true,\n"
    "104,ok,1003,false,true,\n";

Json mapping() {
  return Json{{"campaign_name", "mapped"},
              {"external_ref_column", "rev_id"},
              {"external_ref_template", "https://example.org/diff/{}"},
              {"content_column", "comment"},
              {"added_at_column", "when"},
              {"labels_column", "annotations"},
              {"primary_columns", {{"damage", "damaging"}, {"intent", "goodfaith"}}},
              {"value_map",
               {{"damage", {{"positive", {"true"}}, {"negative", {"false"}}}},
                {"intent", {{"positive", {"false"}}, {"negative", {"true"}}}}}}};
}

TEST(MappedImport, MapsRowsAndSkipsBadOnes) {
  testing::Harness h;
  const auto r = store::import_mapped_csv(*h.service, kMappedCsv, mapping(), h.owner);
  EXPECT_EQ(r.imported, 3u);
  EXPECT_EQ(r.skipped_rows, 1u);
  ASSERT_EQ(r.skipped_reasons.size(), 1u);
  EXPECT_NE(r.skipped_reasons[0].find("line 4"), std::string::npos) << r.skipped_reasons[0];

  const auto snaps = h.campaigns().snapshot(r.campaign, true);
  ASSERT_EQ(snaps.size(), 3u);
  EXPECT_EQ(snaps[0].entity.external_ref, "https://example.org/diff/101");
  EXPECT_EQ(snaps[0].entity.content_snapshot, "blanked page");
  EXPECT_EQ(snaps[0].entity.added_at, 1000);
  EXPECT_EQ(snaps[0].primary->values, choices(P, P));
  EXPECT_EQ(snaps[0].labels.size(), 1u);
  // Explicit labels are kept; the primary still comes from the mapped columns.
  EXPECT_EQ(snaps[1].primary->values, choices(N, N));
  ASSERT_EQ(snaps[1].labels.size(), 1u);
  EXPECT_EQ(snaps[1].labels[0].author, UserId{"x"});
  EXPECT_EQ(snaps[1].labels[0].choices(), choices(P, N));
  EXPECT_NO_THROW(validate_datasheet(h.campaigns().get_campaign(r.campaign).datasheet));
}

TEST(MappedImport, RejectsIncompleteMapping) {
  testing::Harness h;
  auto m = mapping();
  m["primary_columns"].erase("intent");
  EXPECT_THROW(store::import_mapped_csv(*h.service, kMappedCsv, m, h.owner), Error);
  auto missing = mapping();
  missing["external_ref_column"] = "nope";
  EXPECT_THROW(store::import_mapped_csv(*h.service, kMappedCsv, missing, h.owner), Error);
  EXPECT_FALSE(h.campaigns().find_campaign_by_name("mapped"));
}

}  // namespace
}  // namespace wikibench
