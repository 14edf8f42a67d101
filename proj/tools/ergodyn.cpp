// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ergodyn/cli/config.hpp"
#include "ergodyn/cli/runner.hpp"
#include "ergodyn/error.hpp"

namespace {

using ergodyn::cli::ExperimentConfig;

int execute(const ExperimentConfig& config) {
  const bool table = config.kind() == "verify";
  auto progress = [](const std::string& line) { std::cout << line << std::endl; };
  const auto result = ergodyn::cli::run(config, progress);
  if (!table || config.has("out")) ergodyn::cli::emit(result, config, std::cout);
  if (table) {
    const auto& list = result.document["payload"]["criteria"];
    int passed = 0;
    for (const auto& c : list) passed += c["pass"].get<bool>();
    std::cout << passed << "/" << list.size() << " criteria passed" << std::endl;
  }
  if (!result.pass) std::cerr << "ergodyn: " << config.kind() << " finished with status fail" << std::endl;
  return result.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergodyn: ergodicity and stationary-covariance experiments for quadratic Hamiltonians"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ergodyn::cli::kArtifactVersion));

  std::map<std::string, std::map<std::string, std::string>> flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& kind : ergodyn::cli::experiment_kinds()) {
    CLI::App* sub = app.add_subcommand(kind.kind, kind.help);
    subs[kind.kind] = sub;
    auto& slot = flags[kind.kind];
    for (const auto& key : kind.keys) {
      std::string desc = key.help;
      if (!key.fallback.empty()) desc += " [default: " + key.fallback + "]";
      sub->add_option("--" + key.key, slot[key.key], desc);
    }
  }
  std::string config_path;
  CLI::App* run_cmd = app.add_subcommand("run", "run every [section] of a config file");
  run_cmd->add_option("config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run_cmd->parsed()) {
      int worst = 0;
      for (const auto& cfg : ergodyn::cli::read_config(config_path)) worst = std::max(worst, execute(cfg));
      return worst;
    }
    for (const auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      std::map<std::string, std::string> given;
      for (const auto& [key, value] : flags[name]) {
        if (sub->count("--" + key) > 0) given[key] = value;
      }
      return execute(ExperimentConfig::make(name, given));
    }
  } catch (const ergodyn::Error& e) {
    std::cerr << "ergodyn: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "ergodyn: internal error: " << e.what() << std::endl;
    return 1;
  }
  return 1;
}
