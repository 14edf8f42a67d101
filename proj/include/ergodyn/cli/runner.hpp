// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ergodyn/cli/config.hpp"

namespace ergodyn::cli {

inline constexpr std::string_view kSchema = "ergodyn.result/1";
inline constexpr std::string_view kArtifactVersion = "0.1.0";

// Versioned JSON document: schema, artifact_version, experiment, config, seed,
// status ("ok" | "fail"), payload, and a "timestamp" object holding the only
// run-dependent values (UTC time and wall-clock seconds).
struct ResultEnvelope {
  nlohmann::json document;
  std::optional<std::string> csv;  // cov with format = csv
  bool pass = true;

  int exit_code() const { return pass ? 0 : 2; }
};

// Dispatches to the owning module. `progress` receives human-readable lines
// (used by verify to stream its table).
ResultEnvelope run(const ExperimentConfig& config,
                   const std::function<void(const std::string&)>& progress = {});

// Writes CSV or JSON to the configured `out` path atomically, or to `fallback`
// when no path is set.
void emit(const ResultEnvelope& result, const ExperimentConfig& config, std::ostream& fallback);

}  // namespace ergodyn::cli
