// Copyright (c) 2026 The icc-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Run manifests. Every command that writes files appends one JSON line to
// <out>/manifest.jsonl naming the command, its effective configuration, the
// seed, the tool version and the files it produced. Existing lines are never
// rewritten.

#ifndef ICCLAB_MANIFEST_HPP_
#define ICCLAB_MANIFEST_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "icclab/config_io.hpp"

namespace icclab {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kManifestFile = "manifest.jsonl";

struct RunManifest {
  std::string command;
  Json config;
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
  // Relative to the output directory.
  std::vector<std::string> outputs;
};

Json to_json(const RunManifest& m);
RunManifest parse_manifest(const Json& j);

void append_manifest(const std::filesystem::path& dir, const RunManifest& m);
// kParseError names the offending line.
std::vector<RunManifest> read_manifests(const std::filesystem::path& dir);

}  // namespace icclab

#endif  // ICCLAB_MANIFEST_HPP_
