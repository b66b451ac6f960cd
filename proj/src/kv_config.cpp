// Copyright 2026 The ifaa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ifaa/kv_config.hpp"

#include <fstream>
#include <sstream>

#include "ifaa/csv.hpp"
#include "ifaa/error.hpp"

namespace ifaa {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KvConfig KvConfig::parse_string(const std::string& text,
                                const std::string& origin) {
  KvConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError(origin + ": line " + std::to_string(lineno) +
                       ": expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ParseError(origin + ": line " + std::to_string(lineno) +
                       ": empty key");
    cfg.values_[key] = value;
  }
  return cfg;
}

KvConfig KvConfig::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

bool KvConfig::has(const std::string& key) const {
  return values_.count(key) != 0;
}

std::string KvConfig::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    throw ValidationError(origin_ + ": missing required key '" + key + "'");
  return it->second;
}

std::string KvConfig::get_string(const std::string& key,
                                 const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KvConfig::get_double(const std::string& key) const {
  return parse_double_cell(get_string(key), origin_ + ": key '" + key + "'");
}

double KvConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long KvConfig::get_int(const std::string& key) const {
  return parse_int_cell(get_string(key), origin_ + ": key '" + key + "'");
}

long long KvConfig::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t KvConfig::get_uint64(const std::string& key,
                                   std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  long long v = get_int(key);
  if (v < 0)
    throw ValidationError(origin_ + ": key '" + key + "' must be nonnegative");
  return static_cast<std::uint64_t>(v);
}

std::vector<std::string> KvConfig::get_string_list(
    const std::string& key) const {
  std::string raw = get_string(key);
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = raw.find(',', start);
    std::string piece = trim(raw.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<double> KvConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& piece : get_string_list(key))
    out.push_back(
        parse_double_cell(piece, origin_ + ": key '" + key + "'"));
  return out;
}

}  // namespace ifaa
