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

#include "icclab/manifest.hpp"

#include <fstream>
#include <sstream>

#include "icclab/csv_io.hpp"
#include "icclab/error.hpp"

namespace icclab {

Json to_json(const RunManifest& m) {
  return {{"command", m.command},
          {"config", m.config},
          {"seed", m.seed},
          {"tool_version", m.tool_version},
          {"outputs", m.outputs}};
}

RunManifest parse_manifest(const Json& j) {
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config");
    m.seed = j.at("seed").get<std::uint64_t>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("manifest entry: ") + e.what());
  }
  return m;
}

void append_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream out(dir / kManifestFile, std::ios::binary | std::ios::app);
  out << to_json(m).dump() << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "cannot append to " + (dir / kManifestFile).string());
}

std::vector<RunManifest> read_manifests(const std::filesystem::path& dir) {
  std::istringstream in(read_text_file(dir / kManifestFile));
  std::vector<RunManifest> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(parse_manifest(Json::parse(line)));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kParseError, "manifest line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace icclab
