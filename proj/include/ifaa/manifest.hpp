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

#ifndef IFAA_MANIFEST_HPP
#define IFAA_MANIFEST_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ifaa/data_model.hpp"

namespace ifaa {

// Everything needed to reproduce a run bit-exactly, modulo the recorded
// wall-clock timings.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> config;  // effective settings, as strings
  std::map<std::string, std::string> input_hashes;
  std::uint64_t master_seed = 0;
  std::string tool_version;
  std::map<std::string, double> timings_seconds;
  std::vector<std::string> outputs;
  std::vector<std::string> notes;
};

// FNV-1a 64-bit hash of a file's bytes, as hex.
std::string file_hash_hex(const std::string& path);

std::map<std::string, std::string> config_snapshot(const AnalysisConfig& c);

void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace ifaa

#endif  // IFAA_MANIFEST_HPP
