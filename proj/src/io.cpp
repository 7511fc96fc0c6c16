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

#include "unlearn/io.hpp"

#include <cassert>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace unlearn::io {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

bool parse_field(std::string_view field, double& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (begin == end) return false;
  // from_chars rejects a leading '+', which hand-written CSVs do use.
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

[[noreturn]] void fail_at(const std::string& path, std::size_t line,
                          std::size_t column, const std::string& message) {
  std::ostringstream what;
  what << path << ":" << line;
  if (column > 0) what << ":" << column;
  what << ": " << message;
  throw std::runtime_error(what.str());
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error(path + ": cannot open for reading");
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

Eigen::MatrixXd read_csv_matrix(const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);

  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;
  bool first_content_line = true;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string_view line = trim(lines[li]);
    if (line.empty()) continue;
    const std::vector<std::string_view> fields = split_fields(line);

    std::vector<double> row(fields.size());
    bool all_numeric = true;
    std::size_t bad_column = 0;
    for (std::size_t f = 0; f < fields.size(); ++f) {
      if (!parse_field(fields[f], row[f])) {
        all_numeric = false;
        bad_column = f + 1;
        break;
      }
    }
    if (!all_numeric) {
      if (first_content_line) {
        first_content_line = false;  // header row, skip it
        continue;
      }
      fail_at(path, li + 1, bad_column, "cannot parse field as a number");
    }
    for (std::size_t f = 0; f < fields.size(); ++f) {
      if (!std::isfinite(row[f])) {
        fail_at(path, li + 1, f + 1, "non-finite entry rejected");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream message;
      message << "row has " << row.size() << " fields, expected "
              << rows.front().size();
      fail_at(path, li + 1, 0, message.str());
    }
    first_content_line = false;
    rows.push_back(std::move(row));
    row_lines.push_back(li + 1);
  }

  if (rows.empty()) {
    throw std::runtime_error(path + ": no data rows");
  }
  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c];
    }
  }
  return matrix;
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] =
      std::to_chars(buffer, buffer + sizeof(buffer), value);
  assert(ec == std::errc());
  (void)ec;
  return std::string(buffer, ptr);
}

void write_csv_matrix(const std::string& path, const Eigen::MatrixXd& matrix,
                      const std::vector<std::string>& header) {
  if (!header.empty() &&
      header.size() != static_cast<std::size_t>(matrix.cols())) {
    throw std::invalid_argument("write_csv_matrix: header size " +
                                std::to_string(header.size()) +
                                " does not match column count " +
                                std::to_string(matrix.cols()));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error(path + ": cannot open for writing");
  }
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c > 0) out << ',';
      out << header[c];
    }
    out << '\n';
  }
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(matrix(r, c));
    }
    out << '\n';
  }
  if (!out) {
    throw std::runtime_error(path + ": write failed");
  }
}

std::map<std::string, std::string> read_key_value_file(
    const std::string& path) {
  const std::vector<std::string> lines = read_lines(path);
  std::map<std::string, std::string> values;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    std::string_view line = lines[li];
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t equals = line.find('=');
    if (equals == std::string_view::npos) {
      fail_at(path, li + 1, 0, "expected 'key = value'");
    }
    const std::string key{trim(line.substr(0, equals))};
    const std::string value{trim(line.substr(equals + 1))};
    if (key.empty()) {
      fail_at(path, li + 1, 0, "empty key");
    }
    if (!values.emplace(key, value).second) {
      fail_at(path, li + 1, 0, "duplicate key '" + key + "'");
    }
  }
  return values;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (const char ch : text) {
    hash ^= static_cast<unsigned char>(ch);
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string to_hex(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(value));
  return std::string(buffer);
}

}  // namespace unlearn::io
