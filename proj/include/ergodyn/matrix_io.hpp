// Copyright 2026 The ergodyn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>

namespace ergodyn::io {

// Real matrix: whitespace- or comma-separated rows, '#' comments, optional
// first line holding just N. Errors name the source and line.
Eigen::MatrixXd parse_real_matrix(std::istream& in, const std::string& source = "<input>");
Eigen::MatrixXd read_real_matrix(const std::filesystem::path& path);

// Complex matrix: whitespace-separated "re,im" tokens (a bare "re" means
// im = 0), optional first line N.
Eigen::MatrixXcd parse_complex_matrix(std::istream& in, const std::string& source = "<input>");
Eigen::MatrixXcd read_complex_matrix(const std::filesystem::path& path);

std::string to_csv(const Eigen::MatrixXd& m);

// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace ergodyn::io
