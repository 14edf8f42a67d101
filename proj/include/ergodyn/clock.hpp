// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "ergodyn/numeric.hpp"

namespace ergodyn {

// Law of the i.i.d. holding times between switching events, plus the seed of
// the stream that draws them.
class RandomClock {
 public:
  enum class Law { kExponential, kGamma, kUniform };

  static RandomClock exponential(double rate, std::uint64_t seed = 0);
  static RandomClock gamma(double shape, double rate, std::uint64_t seed = 0);
  static RandomClock uniform(double upper, std::uint64_t seed = 0);
  // "exp:RATE", "gamma:SHAPE,RATE" or "uniform:B".
  static RandomClock parse(std::string_view spec, std::uint64_t seed = 0);

  Law law() const { return law_; }
  std::uint64_t seed() const { return seed_; }
  RandomClock with_seed(std::uint64_t seed) const;

  double mean() const;
  // Holding-time density positive on all of [0, inf) with finite mean.
  bool satisfies_condition_d() const { return law_ != Law::kUniform; }
  std::string describe() const;

  class Stream {
   public:
    // Strictly positive holding time.
    double next();

   private:
    friend class RandomClock;
    Stream(const RandomClock& clock);
    Law law_;
    double a_;
    double b_;
    Rng rng_;
  };

  Stream stream() const { return Stream(*this); }

 private:
  RandomClock(Law law, double a, double b, std::uint64_t seed) : law_(law), a_(a), b_(b), seed_(seed) {}

  Law law_;
  double a_;  // rate | shape | upper bound
  double b_;  // unused | rate | unused
  std::uint64_t seed_;
};

}  // namespace ergodyn
