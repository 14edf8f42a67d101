// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#include "ergodyn/clock.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>

#include "ergodyn/error.hpp"

namespace ergodyn {

namespace {

double parse_number(std::string_view text, std::string_view context) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kInvalidArgument, "bad number '" + std::string(text) + "' in clock spec '" +
                                                 std::string(context) + "'");
  }
  return v;
}

}  // namespace

RandomClock RandomClock::exponential(double rate, std::uint64_t seed) {
  if (!(rate > 0.0)) throw Error(ErrorCode::kInvalidArgument, "exponential rate must be positive");
  return {Law::kExponential, rate, 0.0, seed};
}

RandomClock RandomClock::gamma(double shape, double rate, std::uint64_t seed) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw Error(ErrorCode::kInvalidArgument, "gamma shape and rate must be positive");
  return {Law::kGamma, shape, rate, seed};
}

RandomClock RandomClock::uniform(double upper, std::uint64_t seed) {
  if (!(upper > 0.0)) throw Error(ErrorCode::kInvalidArgument, "uniform upper bound must be positive");
  return {Law::kUniform, upper, 0.0, seed};
}

RandomClock RandomClock::parse(std::string_view spec, std::uint64_t seed) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::kInvalidArgument, "clock spec '" + std::string(spec) + "' must look like exp:RATE");
  }
  const auto law = spec.substr(0, colon);
  const auto args = spec.substr(colon + 1);
  if (law == "exp") return exponential(parse_number(args, spec), seed);
  if (law == "uniform") return uniform(parse_number(args, spec), seed);
  if (law == "gamma") {
    const auto comma = args.find(',');
    if (comma == std::string_view::npos) throw Error(ErrorCode::kInvalidArgument, "gamma clock needs SHAPE,RATE");
    return gamma(parse_number(args.substr(0, comma), spec), parse_number(args.substr(comma + 1), spec), seed);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown clock law '" + std::string(law) + "'");
}

RandomClock RandomClock::with_seed(std::uint64_t seed) const {
  RandomClock c = *this;
  c.seed_ = seed;
  return c;
}

double RandomClock::mean() const {
  switch (law_) {
    case Law::kExponential: return 1.0 / a_;
    case Law::kGamma: return a_ / b_;
    case Law::kUniform: return 0.5 * a_;
  }
  return 0.0;
}

std::string RandomClock::describe() const {
  std::ostringstream out;
  out.precision(17);
  switch (law_) {
    case Law::kExponential: out << "exp:" << a_; break;
    case Law::kGamma: out << "gamma:" << a_ << ',' << b_; break;
    case Law::kUniform: out << "uniform:" << a_ << " (non-conforming: violates Condition D)"; break;
  }
  return out.str();
}

RandomClock::Stream::Stream(const RandomClock& clock)
    : law_(clock.law_), a_(clock.a_), b_(clock.b_), rng_(make_stream(clock.seed_, 0xc10c)) {}

double RandomClock::Stream::next() {
  double tau = 0.0;
  while (!(tau > 0.0)) {
    switch (law_) {
      case Law::kExponential: tau = std::exponential_distribution<double>(a_)(rng_); break;
      case Law::kGamma: tau = std::gamma_distribution<double>(a_, 1.0 / b_)(rng_); break;
      case Law::kUniform: tau = std::uniform_real_distribution<double>(0.0, a_)(rng_); break;
    }
  }
  return tau;
}

}  // namespace ergodyn
