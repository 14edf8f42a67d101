// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ergodyn::cli {

enum class Profile { kQuick, kFull };

Profile parse_profile(std::string_view text);
std::string_view to_string(Profile profile);

// Outcome of one acceptance criterion. `value` is compared against `limit`
// with `relation` ("<=" or ">="); pass also folds in secondary checks listed
// in `details`.
struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  double value = 0.0;
  double limit = 0.0;
  std::string relation = "<=";
  std::string summary;
  nlohmann::json details = nlohmann::json::object();
  double seconds = 0.0;
};

struct Criterion {
  int id;
  std::string title;
  std::function<CriterionResult(Profile, std::uint64_t)> run;
};

const std::vector<Criterion>& criteria();

// Runs the criteria in `ids` (all when empty). Exceptions thrown by a
// criterion turn into a FAIL carrying the message.
std::vector<CriterionResult> verify_suite(Profile profile, std::uint64_t seed,
                                          const std::vector<int>& ids = {},
                                          const std::function<void(const CriterionResult&)>& on_done = {});

std::string format_line(const CriterionResult& r);
nlohmann::json to_json(const CriterionResult& r);

}  // namespace ergodyn::cli
