// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#include "wikibench/service.hpp"

#include "wikibench/store.hpp"

namespace wikibench {

Service::Service(Workspace::Options options)
    : ws_(std::move(options)), labels_(ws_), campaigns_(ws_) {
  store::register_appliers(ws_);
  ws_.recover();
}

}  // namespace wikibench
