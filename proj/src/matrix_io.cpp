// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#include "ergodyn/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "ergodyn/error.hpp"

namespace ergodyn::io {
namespace {

[[noreturn]] void fail(const std::string& source, int line, const std::string& what) {
  throw Error(ErrorCode::kIoError, source + ":" + std::to_string(line) + ": " + what);
}

bool parse_double(std::string_view token, double& out) {
  // from_chars rejects a leading '+'.
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

template <typename Scalar, typename TokenParser>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> parse_rows(std::istream& in,
                                                                 const std::string& source,
                                                                 bool comma_separates,
                                                                 TokenParser parse_token) {
  std::vector<std::vector<Scalar>> rows;
  std::vector<int> row_lines;
  long declared = -1;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_comment(raw);
    if (comma_separates) {
      for (char& c : line) {
        if (c == ',' || c == ';') c = ' ';
      }
    }
    std::istringstream tokens(line);
    std::vector<std::string> parts;
    for (std::string t; tokens >> t;) parts.push_back(t);
    if (parts.empty()) continue;
    if (rows.empty() && declared < 0 && parts.size() == 1 && parts[0].find_first_of(".eE,") == std::string::npos) {
      // A lone integer on the first data line is the optional dimension header,
      // unless the file is a 1 x 1 matrix; resolved after reading.
      double n = 0.0;
      if (parse_double(parts[0], n) && n >= 1 && n == static_cast<long>(n)) {
        declared = static_cast<long>(n);
        row_lines.push_back(line_no);
        rows.push_back({parse_token(parts[0], line_no)});
        continue;
      }
    }
    std::vector<Scalar> row;
    row.reserve(parts.size());
    for (const auto& p : parts) row.push_back(parse_token(p, line_no));
    rows.push_back(std::move(row));
    row_lines.push_back(line_no);
  }
  if (declared >= 0 && rows.size() > 1) {
    rows.erase(rows.begin());
    row_lines.erase(row_lines.begin());
  } else {
    declared = -1;
  }
  if (rows.empty()) fail(source, line_no, "no matrix rows found");
  const std::size_t cols = rows.front().size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) {
      fail(source, row_lines[r],
           "row has " + std::to_string(rows[r].size()) + " entries, expected " + std::to_string(cols));
    }
  }
  if (declared >= 0 && (static_cast<std::size_t>(declared) != rows.size() ||
                        static_cast<std::size_t>(declared) != cols)) {
    fail(source, row_lines.front(),
         "header declares N = " + std::to_string(declared) + " but matrix is " +
             std::to_string(rows.size()) + " x " + std::to_string(cols));
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return in;
}

}  // namespace

Eigen::MatrixXd parse_real_matrix(std::istream& in, const std::string& source) {
  return parse_rows<double>(in, source, true, [&](const std::string& token, int line) {
    double v = 0.0;
    if (!parse_double(token, v)) fail(source, line, "cannot parse number '" + token + "'");
    return v;
  });
}

Eigen::MatrixXd read_real_matrix(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_real_matrix(in, path.string());
}

Eigen::MatrixXcd parse_complex_matrix(std::istream& in, const std::string& source) {
  return parse_rows<std::complex<double>>(in, source, false, [&](const std::string& token, int line) {
    const auto comma = token.find(',');
    double re = 0.0, im = 0.0;
    const bool ok = comma == std::string::npos
                        ? parse_double(token, re)
                        : parse_double(std::string_view(token).substr(0, comma), re) &&
                              parse_double(std::string_view(token).substr(comma + 1), im);
    if (!ok) fail(source, line, "cannot parse complex entry '" + token + "'");
    return std::complex<double>(re, im);
  });
}

Eigen::MatrixXcd read_complex_matrix(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_complex_matrix(in, path.string());
}

std::string to_csv(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << m(r, c);
    }
    out << '\n';
  }
  return out.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error(ErrorCode::kIoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorCode::kIoError, "cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace ergodyn::io
