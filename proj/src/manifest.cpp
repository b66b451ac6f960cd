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

#include "ifaa/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "ifaa/csv.hpp"
#include "ifaa/error.hpp"
#include "ifaa/version.hpp"

namespace ifaa {

std::string file_hash_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file for hashing: " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
    if (got < static_cast<std::streamsize>(sizeof(buf))) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(hex);
}

std::map<std::string, std::string> config_snapshot(const AnalysisConfig& c) {
  std::map<std::string, std::string> out;
  out["alpha"] = format_double(c.alpha);
  out["r_refs"] = std::to_string(c.r_refs);
  out["n_perms"] = std::to_string(c.n_perms);
  out["mcp_gamma"] = format_double(c.mcp_gamma);
  out["lambda_grid_size"] = std::to_string(c.lambda_grid_size);
  out["bootstrap_reps"] = std::to_string(c.bootstrap_reps);
  out["ci_level"] = format_double(c.ci_level);
  out["min_overlap"] = std::to_string(c.min_overlap);
  out["master_seed"] = std::to_string(c.master_seed);
  return out;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["tool_version"] =
      manifest.tool_version.empty() ? kVersion : manifest.tool_version;
  j["master_seed"] = manifest.master_seed;
  j["config"] = manifest.config;
  j["input_hashes"] = manifest.input_hashes;
  j["timings_seconds"] = manifest.timings_seconds;
  j["outputs"] = manifest.outputs;
  j["notes"] = manifest.notes;
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace ifaa
