// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ergodyn {

enum class ErrorCode {
  kInvalidArgument,
  kDimensionMismatch,
  kNotSymmetric,
  kNotPositiveDefinite,
  kNotHermitian,
  kNotMixing,
  kNonPositiveEnergy,
  kSearchSpaceTooLarge,
  kTooFewSamples,
  kDegenerateSpectrum,
  kUnstable,
  kKernelNotIntegrable,
  kDisconnectedGraph,
  kConfigError,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Every recoverable failure in the library surfaces as an ergodyn::Error
// carrying a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ergodyn
