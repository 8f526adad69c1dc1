// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

/// \file
/// HTTP/JSON boundary.
///
/// Every JSON response is an envelope: {"ok":true,"data":...} or
/// {"ok":false,"error":{"code":"RevisionConflict","message":...}}, with
/// extra error fields (current_revision, existing_id, line) when present.
/// Export responses are the raw file body.
///
/// Routing is transport independent: Api::handle takes a parsed request,
/// and HttpServer binds it to cpp-httplib.

#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "wikibench/json.hpp"
#include "wikibench/service.hpp"

namespace httplib {
class Server;
}

namespace wikibench::api {

/// Fetches the content snapshot of an external ref. Implementations throw
/// Error{kAdapterFetchFailed} when the content is unavailable.
class SourceAdapter {
 public:
  virtual ~SourceAdapter() = default;
  virtual std::string name() const = 0;
  virtual std::string fetch(const std::string& external_ref) = 0;
};

/// Serves pre-registered content only.
class StaticAdapter final : public SourceAdapter {
 public:
  StaticAdapter() = default;
  explicit StaticAdapter(std::map<std::string, std::string> content);

  void add(std::string external_ref, std::string content);
  std::string name() const override { return "static"; }
  std::string fetch(const std::string& external_ref) override;

 private:
  std::mutex mu_;
  std::map<std::string, std::string> content_;
};

struct Config {
  std::string listen_address = "127.0.0.1";
  int port = 8080;
  /// Log file; empty keeps state in memory.
  std::string storage_path;
  bool fsync = true;
  std::string adapter = "static";
  std::map<std::string, std::string> static_content;
  /// Defaults for campaigns created without explicit thresholds.
  QuadrantThresholds thresholds;
  std::string export_salt;
  bool pseudonymize = true;
};

/// Reads a JSON config file; unknown keys are rejected.
Config load_config(const std::string& path);
Config config_from_json(const Json& j);

/// Applies WIKIBENCH_LISTEN_ADDRESS, WIKIBENCH_PORT, WIKIBENCH_STORAGE_PATH,
/// WIKIBENCH_FSYNC, WIKIBENCH_ADAPTER, WIKIBENCH_EXPORT_SALT and
/// WIKIBENCH_PSEUDONYMIZE. `getenv` is injectable for tests.
void apply_env_overrides(Config& config,
                         const std::function<const char*(const char*)>& getenv = std::getenv);

/// Builds the adapter named by config.adapter ("static" or "none").
std::shared_ptr<SourceAdapter> make_adapter(const Config& config);

/// The one HTTP status for each error code.
int http_status(ErrorCode code) noexcept;

struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string authorization;  // raw Authorization header
  std::string body;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

Json error_body(const Error& e);

class Api {
 public:
  Api(Service& service, std::shared_ptr<SourceAdapter> adapter, Config config = {});

  Response handle(const Request& request);

 private:
  Service& service_;
  std::shared_ptr<SourceAdapter> adapter_;
  Config config_;
};

/// Runs an Api on a cpp-httplib server in a background thread.
class HttpServer {
 public:
  HttpServer(Api& api, std::string host, int port);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds and starts serving; port 0 picks a free port. Returns the port.
  int start();
  /// Serves on the calling thread until stop().
  void run();
  void stop();
  int port() const noexcept { return port_; }

 private:
  void bind();

  Api& api_;
  std::string host_;
  int port_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace wikibench::api
