// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <barrier>
#include <thread>

#include "support/fixtures.hpp"
#include "wikibench/label_engine.hpp"

namespace wikibench {
namespace {

using testing::choices;
using testing::values;

constexpr Choice P = Choice::kPositive;
constexpr Choice N = Choice::kNegative;
constexpr Confidence H = Confidence::kHigh;
constexpr Confidence L = Confidence::kLow;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kStorageError;
}

TEST(Submit, FirstLabelSeedsPrimary) {
  testing::Harness h;
  const auto a = h.user("a");
  const auto e = h.add("r1");
  EXPECT_FALSE(h.labels().primary_label(e));
  const auto out = h.labels().submit_individual_label(a, e, values(P, H, N, H));
  EXPECT_EQ(out.status, SubmitStatus::kRecordedAgree);
  EXPECT_TRUE(out.initialized_primary);
  EXPECT_EQ(out.entity_link, e);
  EXPECT_EQ(out.primary_snapshot, choices(P, N));
  const auto p = h.labels().primary_label(e);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->revision, 1u);
  ASSERT_EQ(p->history.size(), 1u);
  EXPECT_EQ(p->history[0].values, choices(P, N));
  EXPECT_EQ(p->history[0].editor, a);
}

TEST(Submit, NudgeComparesChoicesOnly) {
  testing::Harness h;
  const auto a = h.user("a");
  const auto b = h.user("b");
  const auto e = h.add("r1");
  h.labels().submit_individual_label(a, e, values(P, H, N, H));
  EXPECT_EQ(h.labels().submit_individual_label(b, e, values(P, L, N, L)).status,
            SubmitStatus::kRecordedAgree);
  const auto out = h.labels().submit_individual_label(b, e, values(P, H, P, H));
  EXPECT_EQ(out.status, SubmitStatus::kRecordedDisagreeNudge);
  EXPECT_FALSE(out.initialized_primary);
  EXPECT_EQ(out.primary_snapshot, choices(P, N));
}

TEST(Submit, MajorityNeverMovesPrimary) {
  testing::Harness h;
  const auto e = h.add("r1");
  h.labels().submit_individual_label(h.user("first"), e, values(P, P));
  for (int i = 0; i < 10; ++i) {
    h.labels().submit_individual_label(h.user("u" + std::to_string(i)), e, values(N, N));
  }
  const auto p = h.labels().primary_label(e);
  EXPECT_EQ(p->values, choices(P, P));
  EXPECT_EQ(p->revision, 1u);
}

TEST(Submit, ResubmissionUpsertsAndIsIdempotent) {
  testing::Harness h;
  const auto a = h.user("a");
  const auto b = h.user("b");
  const auto e = h.add("r1");
  h.labels().submit_individual_label(a, e, values(P, P));
  h.labels().submit_individual_label(b, e, values(N, P), std::string("first try"));
  h.labels().submit_individual_label(b, e, values(N, P), std::string("first try"));
  const auto view = h.labels().get_entity_view(b, e);
  EXPECT_EQ(view.labels.size(), 2u);
  EXPECT_EQ(view.primary->revision, 1u);
  EXPECT_TRUE(h.labels().list_notifications(a).empty());

  h.labels().submit_individual_label(b, e, values(P, P), std::string("changed my mind"));
  const auto after = h.labels().get_entity_view(b, e);
  ASSERT_TRUE(after.own_label);
  EXPECT_EQ(after.own_label->choices(), choices(P, P));
  EXPECT_EQ(after.own_label->note, "changed my mind");
  EXPECT_LT(after.own_label->created_at, after.own_label->updated_at);
}

TEST(Submit, Errors) {
  testing::Harness h;
  const auto a = h.user("a");
  const auto e = h.add("r1");
  EXPECT_EQ(code_of([&] { h.labels().submit_individual_label(a, EntityId{"nope"}, values(P, P)); }),
            ErrorCode::kUnknownEntity);
  EXPECT_EQ(code_of([&] { h.labels().submit_individual_label(UserId{"ghost"}, e, values(P, P)); }),
            ErrorCode::kUnknownUser);
  EXPECT_EQ(code_of([&] {
              h.labels().submit_individual_label(a, e, {LabelValue{"damage", P, H}});
            }),
            ErrorCode::kSchemaMismatch);
  h.campaigns().exclude_entity(h.campaign, e, a, "hidden");
  EXPECT_EQ(code_of([&] { h.labels().submit_individual_label(a, e, values(P, P)); }),
            ErrorCode::kExcludedEntity);
}

TEST(EditPrimary, CasAndNotifications) {
  testing::Harness h;
  const auto a = h.user("a");
  const auto b = h.user("b");
  const auto c = h.user("c");
  const auto e = h.add("r1");
  EXPECT_EQ(code_of([&] { h.labels().edit_primary_label(a, e, choices(N, N), 0); }),
            ErrorCode::kNoPrimaryYet);
  h.labels().submit_individual_label(a, e, values(P, P));
  h.labels().submit_individual_label(b, e, values(N, P));
  h.labels().submit_individual_label(c, e, values(N, N));

  const auto p = h.labels().edit_primary_label(b, e, choices(N, P), 1, std::string("see talk"));
  EXPECT_EQ(p.revision, 2u);
  EXPECT_EQ(p.history.size(), 2u);
  EXPECT_EQ(p.history.back().rationale, "see talk");

  EXPECT_EQ(h.labels().list_notifications(a).size(), 1u);
  EXPECT_EQ(h.labels().list_notifications(c).size(), 1u);
  EXPECT_TRUE(h.labels().list_notifications(b).empty());
  const auto n = h.labels().list_notifications(a).front();
  EXPECT_EQ(n.kind, NotificationKind::kPrimaryChanged);
  EXPECT_EQ(n.old_values, choices(P, P));
  EXPECT_EQ(n.new_values, choices(N, P));
  EXPECT_FALSE(n.read);

  try {
    h.labels().edit_primary_label(c, e, choices(N, N), 1);
    FAIL() << "stale edit accepted";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::kRevisionConflict);
    EXPECT_EQ(err.current_revision, 2u);
  }
  EXPECT_EQ(h.labels().primary_label(e)->values, choices(N, P));
  EXPECT_EQ(h.labels().list_notifications(a).size(), 1u);
}

TEST(EditPrimary, SoleLabelerNotifiesNobody) {
  testing::Harness h;
  const auto a = h.user("a");
  const auto e = h.add("r1");
  h.labels().submit_individual_label(a, e, values(P, P));
  h.labels().edit_primary_label(a, e, choices(N, N), 1);
  EXPECT_TRUE(h.labels().list_notifications(a).empty());
}

TEST(EditPrimary, NonLabelerMayEdit) {
  testing::Harness h;
  const auto a = h.user("a");
  const auto outsider = h.user("outsider");
  const auto e = h.add("r1");
  h.labels().submit_individual_label(a, e, values(P, P));
  EXPECT_EQ(h.labels().edit_primary_label(outsider, e, choices(N, N), 1).revision, 2u);
  EXPECT_EQ(h.labels().list_notifications(a).size(), 1u);
}

TEST(EditPrimary, RacingEditsExactlyOneWins) {
  for (int n : {2, 8, 32}) {
    testing::Harness h;
    const auto e = h.add("r1");
    h.labels().submit_individual_label(h.user("seed"), e, values(P, P));
    std::vector<UserId> users;
    for (int i = 0; i < n; ++i) users.push_back(h.user("u" + std::to_string(i)));
    std::atomic<int> ok{0};
    std::atomic<int> conflicts{0};
    std::barrier start(n);
    std::vector<std::thread> threads;
    for (int i = 0; i < n; ++i) {
      threads.emplace_back([&, i] {
        start.arrive_and_wait();
        try {
          h.labels().edit_primary_label(users[i], e, choices(i % 2 ? N : P, N), 1);
          ++ok;
        } catch (const Error& err) {
          if (err.code() == ErrorCode::kRevisionConflict) ++conflicts;
        }
      });
    }
    for (auto& t : threads) t.join();
    EXPECT_EQ(ok.load(), 1) << n;
    EXPECT_EQ(conflicts.load(), n - 1) << n;
    EXPECT_EQ(h.labels().primary_label(e)->revision, 2u);
  }
}

TEST(EntityView, OrderingOwnLabelAndExclusion) {
  testing::Harness h;
  const auto a = h.user("a");
  const auto b = h.user("b");
  const auto e = h.add("r1");
  h.labels().submit_individual_label(b, e, values(P, P), std::string("b note"));
  h.labels().submit_individual_label(a, e, values(N, P));
  h.labels().submit_individual_label(b, e, values(P, N));  // update keeps created_at

  auto view = h.labels().get_entity_view(a, e);
  ASSERT_EQ(view.labels.size(), 2u);
  EXPECT_EQ(view.labels[0].author, b);
  EXPECT_EQ(view.labels[1].author, a);
  ASSERT_TRUE(view.own_label);
  EXPECT_EQ(view.own_label->author, a);
  EXPECT_FALSE(h.labels().get_entity_view(h.user("c"), e).own_label);
  EXPECT_FALSE(h.labels().get_entity_view(UserId{}, e).own_label);

  h.campaigns().exclude_entity(h.campaign, e, a, "revdel");
  view = h.labels().get_entity_view(a, e);
  EXPECT_TRUE(view.entity.excluded);
  EXPECT_EQ(view.entity.exclusion_reason, "revdel");
  EXPECT_EQ(Json(view).at("excluded"), true);
}

TEST(Notifications, NewestFirstAndMarkReadIdempotent) {
  testing::Harness h;
  const auto a = h.user("a");
  const auto b = h.user("b");
  const auto e = h.add("r1");
  h.labels().submit_individual_label(a, e, values(P, P));
  h.labels().edit_primary_label(b, e, choices(N, P), 1);
  h.labels().edit_primary_label(b, e, choices(N, N), 2);
  auto list = h.labels().list_notifications(a);
  ASSERT_EQ(list.size(), 2u);
  EXPECT_GT(list[0].created_at, list[1].created_at);
  EXPECT_EQ(list[0].new_values, choices(N, N));

  EXPECT_EQ(h.labels().mark_notifications_read(a, {list[1].id}), 1u);
  EXPECT_EQ(h.labels().mark_notifications_read(a, {list[1].id}), 0u);
  EXPECT_EQ(h.labels().list_notifications(a, /*unread_only=*/true).size(), 1u);
  // Someone else's id does nothing.
  EXPECT_EQ(h.labels().mark_notifications_read(b, {list[0].id}), 0u);
}

TEST(QuickLabel, CreatesEntityWithFirstLabel) {
  testing::Harness h;
  const auto a = h.user("a");
  const auto b = h.user("b");
  const auto out = h.labels().submit_to_new_entity(h.campaign, "diff/9", "text", a, values(P, N));
  EXPECT_TRUE(out.created_entity);
  EXPECT_TRUE(out.initialized_primary);
  EXPECT_EQ(out.status, SubmitStatus::kRecordedAgree);
  EXPECT_EQ(h.campaigns().find_entity_by_ref(h.campaign, "diff/9"), out.entity_link);

  const auto again = h.labels().submit_to_new_entity(h.campaign, "diff/9", "", b, values(N, N));
  EXPECT_FALSE(again.created_entity);
  EXPECT_EQ(again.entity_link, out.entity_link);
  EXPECT_EQ(again.status, SubmitStatus::kRecordedDisagreeNudge);
  EXPECT_EQ(h.campaigns().snapshot(h.campaign, true).size(), 1u);
}

TEST(QuickLabel, ConcurrentCreatorsShareOneEntity) {
  testing::Harness h;
  constexpr int kThreads = 16;
  std::vector<UserId> users;
  for (int i = 0; i < kThreads; ++i) users.push_back(h.user("u" + std::to_string(i)));
  std::barrier start(kThreads);
  std::atomic<int> created{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < kThreads; ++i) {
    threads.emplace_back([&, i] {
      start.arrive_and_wait();
      const auto out = h.labels().submit_to_new_entity(h.campaign, "shared", "x", users[i],
                                                       values(i % 2 ? P : N, N));
      if (out.created_entity) ++created;
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(created.load(), 1);
  const auto snaps = h.campaigns().snapshot(h.campaign, true);
  ASSERT_EQ(snaps.size(), 1u);
  EXPECT_EQ(snaps[0].labels.size(), static_cast<std::size_t>(kThreads));
  EXPECT_EQ(snaps[0].primary->revision, 1u);
}

}  // namespace
}  // namespace wikibench
