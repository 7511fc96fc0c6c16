// Copyright 2026 The unlearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UNLEARN_IO_HPP_
#define UNLEARN_IO_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace unlearn::io {

// Reads a comma-separated numeric matrix. An optional single header row is
// detected (and skipped) when the first non-blank line fails to parse as
// numbers. Every data row must have the same number of fields; NaN and Inf
// entries are rejected. Diagnostics carry path:line:column positions.
// Throws std::runtime_error.
Eigen::MatrixXd read_csv_matrix(const std::string& path);

// Writes a matrix as CSV with shortest round-trip decimal formatting. When
// header is nonempty its size must equal the column count. Throws
// std::runtime_error on I/O failure, std::invalid_argument on a header
// size mismatch.
void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& matrix,
                      const std::vector<std::string>& header = {});

// Parses a "key = value" configuration file. '#' starts a comment, blank
// lines are skipped, keys must be unique. Values keep interior spaces but
// are trimmed at both ends. Throws std::runtime_error with path:line
// diagnostics.
std::map<std::string, std::string> read_key_value_file(
    const std::string& path);

// 64-bit FNV-1a over the bytes of text.
std::uint64_t fnv1a64(const std::string& text);

// Lower-case hexadecimal rendering of a 64-bit value, zero padded to 16
// digits.
std::string to_hex(std::uint64_t value);

// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

}  // namespace unlearn::io

#endif  // UNLEARN_IO_HPP_
