// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "wikibench/campaign_service.hpp"

namespace wikibench {
namespace {

using testing::choices;
using testing::values;

constexpr Choice P = Choice::kPositive;
constexpr Choice N = Choice::kNegative;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kStorageError;
}

std::vector<EntityId> ids(const std::vector<TableRow>& rows) {
  std::vector<EntityId> out;
  for (const auto& r : rows) out.push_back(r.entity);
  return out;
}

TEST(Campaigns, CreateListFindAndDuplicates) {
  testing::Harness h;
  EXPECT_EQ(h.campaigns().find_campaign_by_name("edits"), h.campaign);
  EXPECT_FALSE(h.campaigns().find_campaign_by_name("other"));
  EXPECT_EQ(code_of([&] {
              h.campaigns().create_campaign(h.owner, "edits", damage_intent_schema(h.owner, 1),
                                            default_datasheet(h.owner, 1));
            }),
            ErrorCode::kDuplicateName);
  EXPECT_EQ(code_of([&] {
              h.campaigns().create_campaign(h.owner, "x", LabelSchema{}, default_datasheet(h.owner, 1));
            }),
            ErrorCode::kInvalidSchema);
  EXPECT_EQ(code_of([&] { h.campaigns().get_campaign(CampaignId{"c404"}); }),
            ErrorCode::kUnknownCampaign);
  EXPECT_EQ(h.campaigns().list_campaigns().size(), 1u);
  EXPECT_EQ(h.campaigns().get_campaign(h.campaign).created_by, h.owner);
}

TEST(Campaigns, Thresholds) {
  testing::Harness h;
  h.campaigns().set_thresholds(h.campaign, {0.3, 0.7}, h.owner);
  EXPECT_EQ(h.campaigns().get_campaign(h.campaign).thresholds, (QuadrantThresholds{0.3, 0.7}));
  EXPECT_THROW(h.campaigns().set_thresholds(h.campaign, {0.0, 0.7}, h.owner), Error);
}

TEST(Entities, DuplicateRefReportsExistingId) {
  testing::Harness h;
  const auto e = h.add("diff/1");
  try {
    h.add("diff/1");
    FAIL() << "duplicate accepted";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kDuplicateExternalRef);
    EXPECT_EQ(err.existing_id, e.str());
  }
  h.campaigns().exclude_entity(h.campaign, e, h.owner, "gone");
  EXPECT_EQ(code_of([&] { h.add("diff/1"); }), ErrorCode::kDuplicateExternalRef);
  EXPECT_EQ(code_of([&] { h.add(""); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] {
              h.campaigns().add_entity(h.campaign, "r", "", UserId{"ghost"});
            }),
            ErrorCode::kUnknownUser);
}

TEST(Entities, SameRefInTwoCampaigns) {
  testing::Harness h;
  const auto other = h.campaigns().create_campaign(h.owner, "other", damage_intent_schema(h.owner, 1),
                                                   default_datasheet(h.owner, 1));
  const auto a = h.add("diff/1");
  const auto b = h.campaigns().add_entity(other, "diff/1", "", h.owner);
  EXPECT_NE(a, b);
}

TEST(Table, ExcludedEntitiesAbsentAndAudited) {
  testing::Harness h;
  const auto keep = h.add("keep");
  const auto drop = h.add("drop");
  EXPECT_EQ(h.campaigns().exclude_entity(h.campaign, drop, h.owner, "suppressed"),
            ExcludeResult::kExcluded);
  EXPECT_EQ(h.campaigns().exclude_entity(h.campaign, drop, h.owner, "again"),
            ExcludeResult::kAlreadyExcluded);
  for (auto mode : {SortMode::kFewestLabels, SortMode::kHighestDisagreement,
                    SortMode::kDiffersFromMine, SortMode::kRecentActivity}) {
    EXPECT_EQ(ids(h.campaigns().list_table(h.campaign, h.owner, mode)), std::vector<EntityId>{keep});
  }
  const auto criteria = h.campaigns().datasheet_history(h.campaign, Datasheet::kInclusionCriteria);
  EXPECT_NE(criteria.current().find("drop"), std::string::npos);
  EXPECT_NE(criteria.current().find("suppressed"), std::string::npos);
  EXPECT_EQ(criteria.current().find("again"), std::string::npos);
  EXPECT_EQ(h.campaigns().snapshot(h.campaign, true).size(), 2u);
  EXPECT_EQ(h.campaigns().snapshot(h.campaign, false).size(), 1u);
}

TEST(Table, PaginationAndLimits) {
  testing::Harness h;
  for (int i = 0; i < 7; ++i) h.add("r" + std::to_string(i));
  const auto all = ids(h.campaigns().list_table(h.campaign, h.owner, SortMode::kFewestLabels, 0, 100));
  ASSERT_EQ(all.size(), 7u);
  std::vector<EntityId> paged;
  for (std::size_t p = 0; p < 3; ++p) {
    for (auto& id : ids(h.campaigns().list_table(h.campaign, h.owner, SortMode::kFewestLabels, p, 3))) {
      paged.push_back(id);
    }
  }
  EXPECT_EQ(paged, all);
  EXPECT_TRUE(h.campaigns().list_table(h.campaign, h.owner, SortMode::kFewestLabels, 5, 3).empty());
  EXPECT_EQ(code_of([&] { h.campaigns().list_table(h.campaign, h.owner, SortMode::kFewestLabels, 0, 0); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] {
              h.campaigns().list_table(h.campaign, h.owner, SortMode::kFewestLabels, 0, kMaxPageSize + 1);
            }),
            ErrorCode::kInvalidArgument);
}

TEST(Table, SortModesMatchOracle) {
  testing::Harness h;
  testing::Rng rng(21);
  std::vector<UserId> users;
  for (int i = 0; i < 6; ++i) users.push_back(h.user("u" + std::to_string(i)));
  const auto& viewer = users[0];
  const auto schema = h.campaigns().get_campaign(h.campaign).schema;
  for (int i = 0; i < 60; ++i) {
    const auto e = h.add("r" + std::to_string(i));
    const int n = static_cast<int>(rng() % 6);
    for (int k = 0; k < n; ++k) {
      h.labels().submit_individual_label(users[(i + k) % users.size()], e,
                                         testing::random_values(rng, schema));
    }
    if (rng() % 5 == 0) {
      h.campaigns().post_to_thread(ThreadScope{h.campaign, e}, "t", "hi", h.owner);
    }
    if (rng() % 10 == 0) h.campaigns().exclude_entity(h.campaign, e, h.owner, "x");
  }

  const auto snaps = h.campaigns().snapshot(h.campaign, false);
  std::map<EntityId, oracle::Rational> spread;
  for (const auto& s : snaps) {
    oracle::Rational best{0, 1};
    if (s.labels.size() >= 2) {
      for (std::size_t d = 0; d < schema.dimensions.size(); ++d) {
        std::vector<LabelValue> xs;
        for (const auto& l : s.labels) xs.push_back(l.values[d]);
        const auto v = oracle::exact_variance(xs);
        if (oracle::less(best, v)) best = v;
      }
    }
    spread[s.entity.id] = best;
  }

  auto check = [&](SortMode mode, auto before) {
    const auto rows = h.campaigns().list_table(h.campaign, viewer, mode, 0, kMaxPageSize);
    ASSERT_EQ(rows.size(), snaps.size());
    for (std::size_t i = 1; i < rows.size(); ++i) {
      ASSERT_TRUE(before(rows[i - 1], rows[i])) << to_string(mode) << " at " << i;
    }
  };
  check(SortMode::kFewestLabels, [](const TableRow& a, const TableRow& b) {
    return a.n_labels < b.n_labels || (a.n_labels == b.n_labels && a.entity < b.entity);
  });
  check(SortMode::kHighestDisagreement, [&](const TableRow& a, const TableRow& b) {
    const auto& x = spread.at(a.entity);
    const auto& y = spread.at(b.entity);
    return oracle::less(y, x) || (oracle::equal(x, y) && a.entity < b.entity);
  });
  check(SortMode::kRecentActivity, [](const TableRow& a, const TableRow& b) {
    return a.last_activity > b.last_activity ||
           (a.last_activity == b.last_activity && a.entity < b.entity);
  });
  check(SortMode::kDiffersFromMine, [](const TableRow& a, const TableRow& b) {
    if (a.differs_from_viewer != b.differs_from_viewer) return a.differs_from_viewer;
    return a.last_activity > b.last_activity ||
           (a.last_activity == b.last_activity && a.entity < b.entity);
  });

  // Row fields agree with the snapshots.
  const auto rows = h.campaigns().list_table(h.campaign, viewer, SortMode::kFewestLabels, 0, kMaxPageSize);
  for (const auto& r : rows) {
    const auto s = std::find_if(snaps.begin(), snaps.end(),
                                [&](const auto& x) { return x.entity.id == r.entity; });
    ASSERT_NE(s, snaps.end());
    EXPECT_EQ(r.n_labels, s->labels.size());
    EXPECT_EQ(r.has_discussion, s->has_discussion);
    const auto mine = std::find_if(s->labels.begin(), s->labels.end(),
                                   [&](const auto& l) { return l.author == viewer; });
    EXPECT_EQ(r.differs_from_viewer,
              mine != s->labels.end() && s->primary && mine->choices() != s->primary->values);
  }
}

TEST(Table, RecentActivityFollowsEdits) {
  testing::Harness h;
  const auto a = h.add("a");
  const auto b = h.add("b");
  EXPECT_EQ(ids(h.campaigns().list_table(h.campaign, h.owner, SortMode::kRecentActivity)),
            (std::vector<EntityId>{b, a}));
  h.campaigns().post_to_thread(ThreadScope{h.campaign, a}, "t", "bump", h.owner);
  EXPECT_EQ(ids(h.campaigns().list_table(h.campaign, h.owner, SortMode::kRecentActivity)),
            (std::vector<EntityId>{a, b}));
}

TEST(Datasheet, EditsKeepHistory) {
  testing::Harness h;
  const auto editor = h.user("editor");
  h.campaigns().edit_datasheet_section(h.campaign, Datasheet::kDataStatement, "v2", editor);
  const auto r = h.campaigns().edit_datasheet_section(h.campaign, Datasheet::kDataStatement, "v3", h.owner);
  const auto history = h.campaigns().datasheet_history(h.campaign, Datasheet::kDataStatement);
  EXPECT_EQ(history.current(), "v3");
  EXPECT_EQ(r.revision, history.revisions.size());
  EXPECT_EQ(history.revisions[history.revisions.size() - 2].author, editor);

  h.campaigns().add_datasheet_section(h.campaign, "known issues", "none yet", editor);
  EXPECT_EQ(h.campaigns().datasheet_history(h.campaign, "known issues").current(), "none yet");
  EXPECT_EQ(code_of([&] { h.campaigns().add_datasheet_section(h.campaign, "known issues", "", editor); }),
            ErrorCode::kDuplicateName);
  EXPECT_EQ(code_of([&] { h.campaigns().edit_datasheet_section(h.campaign, "nope", "", editor); }),
            ErrorCode::kUnknownSection);
  EXPECT_EQ(code_of([&] { h.campaigns().datasheet_history(h.campaign, "nope"); }),
            ErrorCode::kUnknownSection);
}

TEST(Datasheet, DefinitionEditsAppendRevisions) {
  testing::Harness h;
  const auto r = h.campaigns().edit_dimension_definition(h.campaign, "damage", "new text", h.owner);
  EXPECT_EQ(r.revision, 2u);
  const auto schema = h.campaigns().get_campaign(h.campaign).schema;
  EXPECT_EQ(schema.find("damage")->definition_text.current(), "new text");
  EXPECT_EQ(code_of([&] { h.campaigns().edit_dimension_definition(h.campaign, "x", "t", h.owner); }),
            ErrorCode::kUnknownDimension);
}

TEST(Talk, RepliesNestOneLevel) {
  testing::Harness h;
  const auto e = h.add("r");
  const ThreadScope scope{h.campaign, e};
  const auto root = h.campaigns().post_to_thread(scope, "Is this vandalism?", "root", h.owner);
  const auto reply = h.campaigns().post_to_thread(scope, "Is this vandalism?", "reply", h.owner, root);
  const auto deep = h.campaigns().post_to_thread(scope, "Is this vandalism?", "deep", h.owner, reply);
  h.campaigns().post_to_thread(scope, "Second topic", "x", h.owner);
  const auto topics = h.campaigns().thread(scope);
  ASSERT_EQ(topics.size(), 2u);
  ASSERT_EQ(topics[0].posts.size(), 3u);
  EXPECT_FALSE(topics[0].posts[0].parent);
  EXPECT_EQ(topics[0].posts[1].parent, root);
  EXPECT_EQ(topics[0].posts[2].id, deep);
  EXPECT_EQ(topics[0].posts[2].parent, root);
  EXPECT_TRUE(h.campaigns().thread(ThreadScope{h.campaign, std::nullopt}).empty());
}

TEST(Talk, Errors) {
  testing::Harness h;
  const auto e = h.add("r");
  const ThreadScope scope{h.campaign, e};
  EXPECT_EQ(code_of([&] { h.campaigns().post_to_thread(ThreadScope{CampaignId{"c0"}, {}}, "t", "b", h.owner); }),
            ErrorCode::kUnknownScope);
  EXPECT_EQ(code_of([&] { h.campaigns().post_to_thread(ThreadScope{h.campaign, EntityId{"e0"}}, "t", "b", h.owner); }),
            ErrorCode::kUnknownScope);
  EXPECT_EQ(code_of([&] { h.campaigns().post_to_thread(scope, "t", "b", h.owner, PostId{"p0"}); }),
            ErrorCode::kUnknownParent);
  EXPECT_EQ(code_of([&] { h.campaigns().post_to_thread(scope, "", "b", h.owner); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { h.campaigns().thread(ThreadScope{CampaignId{"c0"}, {}}); }),
            ErrorCode::kUnknownScope);
}

TEST(Talk, MentionsNotifyKnownUsers) {
  testing::Harness h;
  const auto alice = h.user("alice");
  const auto bob = h.user("bob");
  h.campaigns().post_to_thread(ThreadScope{h.campaign, std::nullopt}, "Guidelines",
                               "@alice and @bob, also @nobody and mail x@alice.org @alice.", bob);
  const auto inbox = h.labels().list_notifications(alice);
  ASSERT_EQ(inbox.size(), 1u);
  EXPECT_EQ(inbox[0].kind, NotificationKind::kMentioned);
  EXPECT_TRUE(h.labels().list_notifications(bob).empty());
}

}  // namespace
}  // namespace wikibench
