// Copyright 2026 The depbound Authors
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

#include "depbound/io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>

namespace depbound {

namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> Split(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    fields.push_back(Trim(line.substr(start, pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return fields;
}

bool IsBlankOrComment(const std::string& line) {
  const std::string t = Trim(line);
  return t.empty() || t[0] == '#';
}

char DetectDelimiter(const std::string& header) {
  return header.find('\t') != std::string::npos && header.find(',') == std::string::npos ? '\t'
                                                                                          : ',';
}

double ParseReal(const std::string& s, const std::string& source, int line) {
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError(source, line, "invalid real number '" + s + "'");
  }
  return value;
}

std::int64_t ParseDegree(const std::string& s, const std::string& source, int line) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(source, line, "invalid degree '" + s + "'");
  }
  if (value < 0) throw ParseError(source, line, "negative degree " + s);
  return value;
}

}  // namespace

ParseError::ParseError(const std::string& source, int line, const std::string& what)
    : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

LoadedData ReadObservedData(std::istream& outcomes, std::istream* edges,
                            const std::string& outcomes_name, const std::string& edges_name) {
  LoadedData loaded;
  ObservedData& data = loaded.data;

  std::string line;
  int line_no = 0;
  bool have_header = false;
  char delim = ',';
  int id_col = -1, x_col = -1, d_col = -1;
  std::size_t columns = 0;
  std::unordered_map<std::string, int> index_of;

  while (std::getline(outcomes, line)) {
    ++line_no;
    if (IsBlankOrComment(line)) continue;
    if (!have_header) {
      delim = DetectDelimiter(line);
      const auto header = Split(line, delim);
      columns = header.size();
      for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "id") id_col = static_cast<int>(c);
        else if (header[c] == "x") x_col = static_cast<int>(c);
        else if (header[c] == "d") d_col = static_cast<int>(c);
        else throw ParseError(outcomes_name, line_no, "unknown column '" + header[c] + "'");
      }
      if (id_col < 0 || x_col < 0) {
        throw ParseError(outcomes_name, line_no, "header must contain columns id,x[,d]");
      }
      have_header = true;
      continue;
    }
    const auto fields = Split(line, delim);
    if (fields.size() != columns) {
      throw ParseError(outcomes_name, line_no,
                       "expected " + std::to_string(columns) + " fields, found " +
                           std::to_string(fields.size()));
    }
    const std::string& id = fields[static_cast<std::size_t>(id_col)];
    if (id.empty()) throw ParseError(outcomes_name, line_no, "empty id");
    if (!index_of.emplace(id, data.n()).second) {
      throw ParseError(outcomes_name, line_no, "duplicate id '" + id + "'");
    }
    data.ids.push_back(id);
    data.outcomes.push_back(
        ParseReal(fields[static_cast<std::size_t>(x_col)], outcomes_name, line_no));
    if (d_col >= 0) {
      data.degrees.push_back(
          ParseDegree(fields[static_cast<std::size_t>(d_col)], outcomes_name, line_no));
    }
  }
  if (!have_header) throw ParseError(outcomes_name, line_no, "missing header");
  if (data.outcomes.empty()) throw ParseError(outcomes_name, line_no, "no data rows");

  if (d_col < 0) {
    loaded.degrees_present = false;
    data.degrees.assign(data.outcomes.size(), static_cast<std::int64_t>(data.n() - 1));
    loaded.warnings.push_back("no degree column in " + outcomes_name +
                              "; applying the global bound d = n - 1 = " +
                              std::to_string(data.n() - 1) + " to every vertex");
  }

  if (edges == nullptr) return loaded;

  std::set<VertexPair> seen;
  line_no = 0;
  have_header = false;
  while (std::getline(*edges, line)) {
    ++line_no;
    if (IsBlankOrComment(line)) continue;
    if (!have_header) {
      delim = DetectDelimiter(line);
      const auto header = Split(line, delim);
      if (header.size() != 2 || header[0] != "id_i" || header[1] != "id_j") {
        throw ParseError(edges_name, line_no, "header must be id_i,id_j");
      }
      have_header = true;
      continue;
    }
    const auto fields = Split(line, delim);
    if (fields.size() != 2) {
      throw ParseError(edges_name, line_no,
                       "expected 2 fields, found " + std::to_string(fields.size()));
    }
    int ends[2];
    for (int k = 0; k < 2; ++k) {
      auto it = index_of.find(fields[static_cast<std::size_t>(k)]);
      if (it == index_of.end()) {
        throw ParseError(edges_name, line_no,
                         "unknown id '" + fields[static_cast<std::size_t>(k)] + "'");
      }
      ends[k] = it->second;
    }
    if (ends[0] == ends[1]) {
      throw ParseError(edges_name, line_no, "self-loop at id '" + fields[0] + "'");
    }
    const VertexPair e(ends[0], ends[1]);
    if (!seen.insert(e).second) {
      loaded.warnings.push_back(edges_name + ":" + std::to_string(line_no) +
                                ": duplicate edge {" + fields[0] + ", " + fields[1] +
                                "} ignored");
      continue;
    }
    data.observed_edges.push_back(e);
  }
  if (!have_header && line_no > 0) throw ParseError(edges_name, line_no, "missing header");
  return loaded;
}

LoadedData LoadObservedData(const std::string& outcomes_path,
                            const std::optional<std::string>& edges_path) {
  std::ifstream outcomes(outcomes_path);
  if (!outcomes) throw DataError("cannot open outcomes file " + outcomes_path);
  if (!edges_path) return ReadObservedData(outcomes, nullptr, outcomes_path);
  std::ifstream edges(*edges_path);
  if (!edges) throw DataError("cannot open edges file " + *edges_path);
  return ReadObservedData(outcomes, &edges, outcomes_path, *edges_path);
}

ObservedData WithGlobalDegreeBound(ObservedData data, std::int64_t bound) {
  if (bound < 0) throw std::invalid_argument("global degree bound must be nonnegative");
  std::fill(data.degrees.begin(), data.degrees.end(), bound);
  return data;
}

}  // namespace depbound
