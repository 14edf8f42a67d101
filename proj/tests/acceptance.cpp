// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

// Runs every acceptance criterion at full size and prints one line each.
// Optional arguments: profile (full|quick) and seed.

#include <cstdlib>
#include <iostream>
#include <string>

#include "ergodyn/cli/verify.hpp"
#include "ergodyn/error.hpp"

int main(int argc, char** argv) {
  using namespace ergodyn::cli;
  try {
    const Profile profile = argc > 1 ? parse_profile(argv[1]) : Profile::kFull;
    const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 20260101ULL;
    int failed = 0, total = 0;
    verify_suite(profile, seed, {}, [&](const CriterionResult& r) {
      ++total;
      if (!r.pass) ++failed;
      std::cout << format_line(r) << std::endl;
    });
    std::cout << (total - failed) << "/" << total << " criteria passed" << std::endl;
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << "\n";
    return EXIT_FAILURE;
  }
}
