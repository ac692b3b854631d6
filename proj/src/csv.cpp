// Copyright 2026 The shuttle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shuttle/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "shuttle/errors.hpp"

namespace shuttle::csv {

std::string format(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) fail(ErrorKind::domain, "cannot format value");
  return std::string(buf, end);
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    auto cell = line.substr(start, pos == std::string_view::npos
                                       ? std::string_view::npos
                                       : pos - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t'))
      cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' ||
                             cell.back() == '\r'))
      cell.remove_suffix(1);
    out.push_back(cell);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

Table parse(std::string_view text, const std::string& origin) {
  Table t;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto cells = split(line);
    if (t.header.empty()) {
      for (auto c : cells) t.header.emplace_back(c);
      continue;
    }
    if (cells.size() != t.header.size())
      fail(ErrorKind::config, origin + ":" + std::to_string(line_no) +
                                  ": expected " +
                                  std::to_string(t.header.size()) + " columns");
    std::vector<double> row(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      auto c = cells[i];
      auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), row[i]);
      if (ec != std::errc{} || p != c.data() + c.size())
        fail(ErrorKind::config, origin + ":" + std::to_string(line_no) +
                                    ": bad number '" + std::string(c) + "'");
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) fail(ErrorKind::config, origin + ": empty file");
  return t;
}

Table read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::config, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::string render(const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += format(r[i]);
    }
    out += '\n';
  }
  return out;
}

void write(const std::string& path, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::config, "cannot write " + path);
  out << render(header, rows);
}

}  // namespace shuttle::csv
