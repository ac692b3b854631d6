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

#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small CSV helpers shared by the file-format readers and writers.
namespace shuttle::csv {

// Shortest decimal form that round-trips to the same double.
std::string format(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read(const std::string& path);
Table parse(std::string_view text, const std::string& origin);

void write(const std::string& path, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows);
std::string render(const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows);

}  // namespace shuttle::csv
