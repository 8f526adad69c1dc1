// Copyright 2026 The Wikibench Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line entry point: HTTP server, user registry, export/import and
// model evaluation.

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wikibench/api.hpp"
#include "wikibench/eval_report.hpp"
#include "wikibench/store.hpp"

namespace fs = std::filesystem;
using namespace wikibench;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kInvalidArgument, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kInvalidArgument, "cannot write '" + path.string() + "'");
  out << data;
}

std::unique_ptr<Service> open_service(const std::string& storage) {
  Workspace::Options options;
  options.log_path = storage;
  return std::make_unique<Service>(options);
}

CampaignId resolve_campaign(const Service& service, const std::string& id_or_name) {
  if (auto id = service.campaigns().find_campaign_by_name(id_or_name)) return *id;
  return service.campaigns().get_campaign(CampaignId{id_or_name}).id;
}

store::Format format_for(const std::string& name, const std::string& path) {
  if (!name.empty()) {
    auto f = store::parse_format(name);
    if (!f) fail(ErrorCode::kInvalidArgument, "format must be jsonl or csv");
    return *f;
  }
  return fs::path(path).extension() == ".csv" ? store::Format::kCsv : store::Format::kJsonl;
}

api::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wikibench collaborative dataset curation"};
  app.require_subcommand(1);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  std::string config_path;
  serve->add_option("--config", config_path, "JSON config file");

  // user add
  auto* user = app.add_subcommand("user", "Manage members");
  user->require_subcommand(1);
  auto* user_add = user->add_subcommand("add", "Register a member and print a fresh token");
  std::string storage;
  std::string user_id;
  std::string display_name;
  user_add->add_option("--storage", storage, "Log file")->required();
  user_add->add_option("--id", user_id, "User id")->required();
  user_add->add_option("--name", display_name, "Display name");

  // export
  auto* exp = app.add_subcommand("export", "Export a campaign");
  std::string campaign;
  std::string format;
  std::string out_path;
  std::string salt;
  bool no_pseudonymize = false;
  exp->add_option("--storage", storage, "Log file")->required();
  exp->add_option("--campaign", campaign, "Campaign id or name")->required();
  exp->add_option("--format", format, "jsonl or csv")->default_val("jsonl");
  exp->add_option("--out", out_path, "Output file (stdout when omitted)");
  exp->add_option("--salt", salt, "Pseudonymization salt");
  exp->add_flag("--no-pseudonymize", no_pseudonymize, "Export user ids verbatim");

  // import
  auto* imp = app.add_subcommand("import", "Import a campaign export or a mapped CSV");
  std::string in_path;
  std::string mapping_path;
  std::string new_name;
  imp->add_option("--storage", storage, "Log file")->required();
  imp->add_option("--user", user_id, "Importing member")->required();
  imp->add_option("--file", in_path, "Input file")->required()->check(CLI::ExistingFile);
  imp->add_option("--format", format, "jsonl or csv (default: from extension)");
  imp->add_option("--mapping", mapping_path, "Column mapping for a foreign CSV")
      ->check(CLI::ExistingFile);
  imp->add_option("--name", new_name, "Campaign name override");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate model predictions");
  std::string dimension;
  std::vector<std::string> predictions;
  std::string out_dir;
  bool weighted = false;
  evaluate->add_option("--campaign", campaign, "Campaign id or name, or an export file")
      ->required();
  evaluate->add_option("--storage", storage, "Log file, when --campaign is an id or name");
  evaluate->add_option("--dimension", dimension, "Dimension to evaluate")->required();
  evaluate->add_option("--predictions", predictions, "Prediction files")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--out", out_dir, "Directory for report.json, report.txt and roc.csv")
      ->required();
  evaluate->add_flag("--weighted", weighted, "Also report disagreement-weighted accuracy");

  CLI11_PARSE(app, argc, argv);

  try {
    if (serve->parsed()) {
      auto config = config_path.empty() ? api::Config{} : api::load_config(config_path);
      api::apply_env_overrides(config);
      Workspace::Options options;
      if (!config.storage_path.empty()) options.log_path = config.storage_path;
      options.fsync = config.fsync;
      Service service(options);
      api::Api handler(service, api::make_adapter(config), config);
      api::HttpServer server(handler, config.listen_address, config.port);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << config.listen_address << ":" << config.port << "\n";
      server.run();
      g_server = nullptr;
      return 0;
    }
    if (user_add->parsed()) {
      auto service = open_service(storage);
      std::cout << service->workspace().register_user(
                       UserId{user_id}, display_name.empty() ? user_id : display_name)
                << "\n";
      return 0;
    }
    if (exp->parsed()) {
      auto service = open_service(storage);
      store::ExportOptions options;
      options.pseudonymize = !no_pseudonymize;
      options.salt = salt;
      const auto data = store::export_campaign(*service, resolve_campaign(*service, campaign),
                                               format_for(format, ""), options);
      if (out_path.empty()) {
        std::cout << data;
      } else {
        write_file(out_path, data);
      }
      return 0;
    }
    if (imp->parsed()) {
      auto service = open_service(storage);
      const auto data = read_file(in_path);
      if (!mapping_path.empty()) {
        auto mapping = Json::parse(read_file(mapping_path));
        if (!new_name.empty()) mapping["campaign_name"] = new_name;
        const auto r = store::import_mapped_csv(*service, data, mapping, UserId{user_id});
        std::cout << r.campaign.str() << "\nimported " << r.imported << ", skipped "
                  << r.skipped_rows << "\n";
        for (const auto& why : r.skipped_reasons) std::cerr << "  " << why << "\n";
        return 0;
      }
      store::ImportOptions options;
      if (!new_name.empty()) options.name = new_name;
      std::cout << store::import_campaign(*service, data, format_for(format, in_path),
                                          UserId{user_id}, options)
                       .str()
                << "\n";
      return 0;
    }
    if (evaluate->parsed()) {
      std::unique_ptr<Service> service;
      CampaignId id;
      if (fs::is_regular_file(campaign)) {
        service = std::make_unique<Service>();
        const UserId importer{"evaluator"};
        service->workspace().register_user(importer, "evaluator");
        id = store::import_campaign(*service, read_file(campaign), format_for("", campaign),
                                    importer);
      } else {
        if (storage.empty()) {
          fail(ErrorCode::kInvalidArgument, "--storage is required unless --campaign is a file");
        }
        service = open_service(storage);
        id = resolve_campaign(*service, campaign);
      }
      std::vector<eval::PredictionSet> sets;
      for (const auto& p : predictions) sets.push_back(eval::load_predictions(p));
      eval::CompareOptions options;
      options.weighted = weighted;
      const auto cmp = eval::compare_models(*service, id, dimension, sets, options);
      fs::create_directories(out_dir);
      write_file(fs::path(out_dir) / "report.json", Json(cmp).dump(2) + "\n");
      const auto table = eval::text_table(cmp);
      write_file(fs::path(out_dir) / "report.txt", table);
      write_file(fs::path(out_dir) / "roc.csv", eval::roc_csv(cmp));
      std::cout << table;
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
