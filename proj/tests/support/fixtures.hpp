// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "wikibench/clock.hpp"
#include "wikibench/service.hpp"

namespace wikibench::testing {

using Rng = std::mt19937_64;

/// Directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("wikibench-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Workspace::Options options(std::shared_ptr<ManualClock> clock,
                                  std::optional<std::filesystem::path> log = std::nullopt) {
  Workspace::Options o;
  o.clock = std::move(clock);
  o.log_path = std::move(log);
  o.fsync = false;
  return o;
}

/// In-memory service with a deterministic clock, a creator account and one
/// damage/intent campaign.
struct Harness {
  std::shared_ptr<ManualClock> clock = std::make_shared<ManualClock>();
  std::unique_ptr<Service> service;
  UserId owner{"owner"};
  CampaignId campaign;

  explicit Harness(std::optional<std::filesystem::path> log = std::nullopt,
                   std::string name = "edits") {
    service = std::make_unique<Service>(options(clock, std::move(log)));
    if (!service->workspace().find_user(owner)) {
      service->workspace().register_user(owner, "Owner");
    }
    if (auto existing = service->campaigns().find_campaign_by_name(name)) {
      campaign = *existing;
    } else {
      const auto at = clock->now();
      campaign = service->campaigns().create_campaign(owner, name, damage_intent_schema(owner, at),
                                                      default_datasheet(owner, at));
    }
  }

  UserId user(const std::string& id) {
    const UserId u{id};
    if (!service->workspace().find_user(u)) service->workspace().register_user(u, id);
    return u;
  }

  EntityId add(const std::string& ref) {
    return service->campaigns().add_entity(campaign, ref, "content of " + ref, owner);
  }

  LabelEngine& labels() { return service->labels(); }
  CampaignService& campaigns() { return service->campaigns(); }
};

inline std::vector<LabelValue> values(Choice damage, Confidence dc, Choice intent,
                                      Confidence ic = Confidence::kHigh) {
  return {LabelValue{"damage", damage, dc}, LabelValue{"intent", intent, ic}};
}

inline std::vector<LabelValue> values(Choice damage, Choice intent) {
  return values(damage, Confidence::kHigh, intent, Confidence::kHigh);
}

inline ChoiceMap choices(Choice damage, Choice intent) {
  return ChoiceMap{{"damage", damage}, {"intent", intent}};
}

inline Choice random_choice(Rng& rng) {
  return std::bernoulli_distribution(0.5)(rng) ? Choice::kPositive : Choice::kNegative;
}

inline Confidence random_confidence(Rng& rng) {
  return std::bernoulli_distribution(0.5)(rng) ? Confidence::kHigh : Confidence::kLow;
}

inline LabelValue random_value(Rng& rng, std::string dimension = "d") {
  return LabelValue{std::move(dimension), random_choice(rng), random_confidence(rng)};
}

inline std::vector<LabelValue> random_values(Rng& rng, const LabelSchema& schema) {
  std::vector<LabelValue> out;
  for (const auto& d : schema.dimensions) out.push_back(random_value(rng, d.name));
  return out;
}

}  // namespace wikibench::testing
