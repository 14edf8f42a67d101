// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ergodyn::cli {

enum class ValueType { kReal, kInt, kText };

struct KeySpec {
  std::string key;
  ValueType type;
  std::string fallback;  // empty text means unset
  std::string help;
  bool required = false;
};

struct KindSpec {
  std::string kind;
  std::string help;
  std::vector<KeySpec> keys;
};

// Every experiment kind with its accepted keys. Drives both the command-line
// flags and config-file validation.
const std::vector<KindSpec>& experiment_kinds();
const KindSpec& kind_spec(std::string_view kind);

class ExperimentConfig {
 public:
  // Validates keys and values against the kind's schema and fills defaults.
  // Throws ConfigError naming the offending key.
  static ExperimentConfig make(const std::string& kind, const std::map<std::string, std::string>& values);

  const std::string& kind() const { return kind_; }
  double real(const std::string& key) const;
  long integer(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  bool has(const std::string& key) const;  // non-empty value
  std::uint64_t seed() const;

  // Effective values, typed.
  nlohmann::json echo() const;

 private:
  const KeySpec& spec(const std::string& key) const;
  std::string kind_;
  std::map<std::string, std::string> values_;
};

// Line-oriented config: "[kind]" section headers, "key = value" lines,
// '#' comments. One experiment per section, run in file order.
std::vector<ExperimentConfig> parse_config(std::istream& in, const std::string& source = "<config>");
std::vector<ExperimentConfig> read_config(const std::string& path);

}  // namespace ergodyn::cli
