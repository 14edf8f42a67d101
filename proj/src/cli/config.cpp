// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#include "ergodyn/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "ergodyn/error.hpp"

namespace ergodyn::cli {

namespace {

using VT = ValueType;

KeySpec seed_key() { return {"seed", VT::kInt, "0", "experiment seed"}; }
KeySpec out_key() { return {"out", VT::kText, "", "output file (stdout when empty)"}; }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_real(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_int(const std::string& text, long& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec == std::errc() && ptr == last) return true;
  // Accept integral reals such as 1e5.
  double d = 0.0;
  if (parse_real(text, d) && d == std::floor(d) && std::abs(d) < 9e15) {
    out = static_cast<long>(d);
    return true;
  }
  return false;
}

}  // namespace

const std::vector<KindSpec>& experiment_kinds() {
  static const std::vector<KindSpec> kinds{
      {"flip-sim",
       "velocity-flip ergodicity experiment on a quadratic Hamiltonian",
       {{"matrix", VT::kText, "", "file holding V", true},
        {"energy", VT::kReal, "1", "energy level h"},
        {"clock", VT::kText, "exp:1", "holding-time law: exp:RATE | gamma:K,RATE | uniform:B"},
        {"time", VT::kReal, "1e5", "horizon T per replica"},
        {"replicas", VT::kInt, "8", "independent replicas"},
        {"observables", VT::kText, "auto", "comma-separated list, e.g. p1^2,q1q2,H2 (auto: all p_i^2 and q1q2)"},
        {"reference-samples", VT::kInt, "1000000", "microcanonical Monte-Carlo samples"},
        {"threshold", VT::kReal, "0.05", "relative-error threshold"},
        {"max-coeff", VT::kInt, "20", "rational-independence coefficient bound"},
        {"relation-tol", VT::kReal, "1e-9", "rational-independence tolerance"},
        seed_key(),
        out_key()}},
      {"qc-check",
       "Lie-algebra controllability report for two Hermitian matrices",
       {{"h1", VT::kText, "", "file or builtin (pauli:x|y|z, diag:a,b,...)", true},
        {"h2", VT::kText, "", "file or builtin", true},
        {"lie-tol", VT::kReal, "1e-10", "relative rank tolerance of the Lie closure"},
        out_key()}},
      {"qc-sim",
       "random switching between e^{-itH1} and e^{-itH2}: Haar moments and Cesaro averages",
       {{"h1", VT::kText, "", "file or builtin", true},
        {"h2", VT::kText, "", "file or builtin", true},
        {"steps", VT::kInt, "50", "switching steps per run"},
        {"runs", VT::kInt, "2000", "independent runs for the moment test"},
        {"clock", VT::kText, "exp:1", "holding-time law"},
        {"horizon", VT::kReal, "1e4", "Cesaro horizon T"},
        {"threshold", VT::kReal, "4", "moment test |z| threshold"},
        {"cesaro-tol", VT::kReal, "0.05", "allowed Cesaro deviation from Tr(A)/N"},
        seed_key(),
        out_key()}},
      {"cov",
       "analytic stationary covariance C_psi(lag) of the driven system",
       {{"matrix", VT::kText, "", "file holding V", true},
        {"alpha", VT::kReal, "1", "damping coefficient"},
        {"kernel", VT::kText, "white:1", "white:SIGMA2 | gauss[:AMP,WIDTH] | bspline[:AMP,WIDTH] | zero"},
        {"lag", VT::kReal, "0", "time lag s"},
        {"format", VT::kText, "csv", "csv | json"},
        {"rel-tol", VT::kReal, "1e-12", "quadrature relative tolerance"},
        {"tail-tol", VT::kReal, "1e-10", "quadrature tail tolerance"},
        {"max-horizon", VT::kReal, "1e4", "largest quadrature horizon"},
        out_key()}},
      {"cov-verify",
       "stochastic simulation oracle against the analytic covariance",
       {{"matrix", VT::kText, "", "file holding V", true},
        {"alpha", VT::kReal, "1", "damping coefficient (0 checks energy growth)"},
        {"kernel", VT::kText, "white:1", "forcing kernel"},
        {"time", VT::kReal, "1e4", "horizon T"},
        {"dt", VT::kReal, "1e-3", "time step"},
        {"paths", VT::kInt, "16", "independent paths"},
        {"frequencies", VT::kInt, "512", "cosines in the colored-noise synthesis"},
        {"tolerance", VT::kReal, "0.03", "relative tolerance on entries"},
        seed_key(),
        out_key()}},
      {"thermo-scan",
       "stationary covariance along chain truncations, driven at the last vertex",
       {{"graph", VT::kText, "chain:8,16,32", "chain:N1,N2,..."},
        {"diagonal", VT::kReal, "2.5", "chain template diagonal (off-diagonal -1)"},
        {"alpha", VT::kReal, "1", "damping coefficient"},
        {"kernel", VT::kText, "gauss", "forcing kernel"},
        {"probe", VT::kText, "1,2", "probe pairs i,j separated by ';' (1-based template vertices)"},
        seed_key(),
        out_key()}},
      {"ldim",
       "mixing-subspace report: dim L_0, V+ status, covering bound",
       {{"matrix", VT::kText, "", "file holding V", true},
        {"max-coeff", VT::kInt, "20", "rational-independence coefficient bound"},
        {"relation-tol", VT::kReal, "1e-9", "rational-independence tolerance"},
        out_key()}},
      {"generic-sample",
       "genericity probes: random Hermitian pairs, or random local V on a graph",
       {{"dim", VT::kInt, "2", "matrix size N for Hermitian pairs"},
        {"samples", VT::kInt, "200", "number of samples"},
        {"graph", VT::kText, "", "chain:N | star:N | complete:N | grid:RxC (switches to the dim L_0 probe)"},
        {"margin", VT::kReal, "0.1", "diagonal-dominance margin for local V"},
        {"threshold", VT::kReal, "1", "required fraction"},
        seed_key(),
        out_key()}},
      {"verify",
       "acceptance battery",
       {{"profile", VT::kText, "quick", "quick | full"},
        {"only", VT::kText, "", "comma-separated criterion ids"},
        seed_key(),
        out_key()}},
  };
  return kinds;
}

const KindSpec& kind_spec(std::string_view kind) {
  for (const auto& k : experiment_kinds()) {
    if (k.kind == kind) return k;
  }
  throw Error(ErrorCode::kConfigError, "unknown experiment kind '" + std::string(kind) + "'");
}

ExperimentConfig ExperimentConfig::make(const std::string& kind, const std::map<std::string, std::string>& values) {
  const auto& ks = kind_spec(kind);
  ExperimentConfig cfg;
  cfg.kind_ = kind;
  for (const auto& [key, value] : values) {
    const auto it = std::find_if(ks.keys.begin(), ks.keys.end(), [&](const KeySpec& k) { return k.key == key; });
    if (it == ks.keys.end()) {
      throw Error(ErrorCode::kConfigError, "unknown key '" + key + "' for " + kind);
    }
  }
  for (const auto& k : ks.keys) {
    const auto it = values.find(k.key);
    std::string v = it != values.end() ? trim(it->second) : k.fallback;
    if (k.required && v.empty()) throw Error(ErrorCode::kConfigError, "missing required key '" + k.key + "'");
    if (!v.empty()) {
      double d = 0.0;
      long l = 0;
      if (k.type == VT::kReal && !parse_real(v, d)) {
        throw Error(ErrorCode::kConfigError, "key '" + k.key + "': expected a number, got '" + v + "'");
      }
      if (k.type == VT::kInt && !parse_int(v, l)) {
        throw Error(ErrorCode::kConfigError, "key '" + k.key + "': expected an integer, got '" + v + "'");
      }
    }
    cfg.values_[k.key] = v;
  }
  return cfg;
}

const KeySpec& ExperimentConfig::spec(const std::string& key) const {
  const auto& ks = kind_spec(kind_);
  for (const auto& k : ks.keys) {
    if (k.key == key) return k;
  }
  throw Error(ErrorCode::kConfigError, "key '" + key + "' is not defined for " + kind_);
}

double ExperimentConfig::real(const std::string& key) const {
  spec(key);
  double d = 0.0;
  if (!parse_real(values_.at(key), d)) throw Error(ErrorCode::kConfigError, "key '" + key + "' is unset");
  return d;
}

long ExperimentConfig::integer(const std::string& key) const {
  spec(key);
  long l = 0;
  if (!parse_int(values_.at(key), l)) throw Error(ErrorCode::kConfigError, "key '" + key + "' is unset");
  return l;
}

const std::string& ExperimentConfig::text(const std::string& key) const {
  spec(key);
  return values_.at(key);
}

bool ExperimentConfig::has(const std::string& key) const {
  const auto it = values_.find(key);
  return it != values_.end() && !it->second.empty();
}

std::uint64_t ExperimentConfig::seed() const {
  if (!has("seed")) return 0;
  const long s = integer("seed");
  if (s < 0) throw Error(ErrorCode::kConfigError, "key 'seed' must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

nlohmann::json ExperimentConfig::echo() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& k : kind_spec(kind_).keys) {
    const auto& v = values_.at(k.key);
    if (v.empty()) {
      j[k.key] = nullptr;
    } else if (k.type == VT::kReal) {
      j[k.key] = real(k.key);
    } else if (k.type == VT::kInt) {
      j[k.key] = integer(k.key);
    } else {
      j[k.key] = v;
    }
  }
  return j;
}

std::vector<ExperimentConfig> parse_config(std::istream& in, const std::string& source) {
  std::vector<ExperimentConfig> out;
  std::string kind;
  std::map<std::string, std::string> values;
  int section_line = 0;
  auto flush = [&] {
    if (kind.empty()) return;
    try {
      out.push_back(ExperimentConfig::make(kind, values));
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfigError,
                  source + ":" + std::to_string(section_line) + ": [" + kind + "] " + e.what());
    }
    values.clear();
  };
  std::string line;
  int number = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::kConfigError, source + ":" + std::to_string(number) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') fail("unterminated section header");
      flush();
      kind = trim(body.substr(1, body.size() - 2));
      section_line = number;
      try {
        kind_spec(kind);
      } catch (const Error&) {
        fail("unknown experiment kind '" + kind + "'");
      }
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    if (kind.empty()) fail("key outside of a [section]");
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) fail("empty key");
    if (values.count(key)) fail("duplicate key '" + key + "'");
    values[key] = trim(body.substr(eq + 1));
  }
  flush();
  if (out.empty()) throw Error(ErrorCode::kConfigError, source + ": no [section] found");
  return out;
}

std::vector<ExperimentConfig> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open config '" + path + "'");
  return parse_config(in, path);
}

}  // namespace ergodyn::cli
