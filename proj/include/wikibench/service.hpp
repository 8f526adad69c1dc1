// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>

#include "wikibench/campaign_service.hpp"
#include "wikibench/label_engine.hpp"
#include "wikibench/workspace.hpp"

namespace wikibench {

/// Owns the workspace and the services built on it, and replays the log
/// once all of them have registered their event appliers.
class Service {
 public:
  explicit Service(Workspace::Options options = {});

  Workspace& workspace() noexcept { return ws_; }
  const Workspace& workspace() const noexcept { return ws_; }
  LabelEngine& labels() noexcept { return labels_; }
  const LabelEngine& labels() const noexcept { return labels_; }
  CampaignService& campaigns() noexcept { return campaigns_; }
  const CampaignService& campaigns() const noexcept { return campaigns_; }

 private:
  Workspace ws_;
  LabelEngine labels_;
  CampaignService campaigns_;
};

}  // namespace wikibench
