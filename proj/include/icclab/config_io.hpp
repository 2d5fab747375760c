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

// JSON configuration documents. Every section is optional and defaults to
// the values that reproduce the reference figures; unknown keys and
// ill-typed values are rejected with the JSON pointer of the offending
// field.

#ifndef ICCLAB_CONFIG_IO_HPP_
#define ICCLAB_CONFIG_IO_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "icclab/landscape.hpp"
#include "icclab/losses.hpp"
#include "icclab/svm.hpp"
#include "icclab/toy.hpp"

namespace icclab {

using Json = nlohmann::json;

struct PathsConfig {
  std::vector<std::array<double, 2>> starts = default_descent_starts();
  // 0 selects half the smaller axis step.
  double step = 0.0;
  std::size_t max_steps = 10000;
};

struct SweepConfig {
  std::vector<double> lambdas{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  bool shared_batches = true;
};

struct ToyExperiment {
  ToyDataConfig data;
  EncoderConfig encoder;
  TrainConfig train;
  EvalConfig eval;
  // Each seed drives its own dataset, initialisation, batches and trials.
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<LossKind> kinds{LossKind::kGe2e, LossKind::kAngleProto, LossKind::kSupCon};
};

struct ExperimentConfig {
  GridConfig grid;
  LossSpec loss{LossKind::kIccReg};
  SvmConfig svm;
  SweepConfig sweep;
  PathsConfig paths;
  ToyExperiment toy;
};

Json to_json(const GridConfig& c);
Json to_json(const LossSpec& c);
Json to_json(const SvmConfig& c);
Json to_json(const ToyDataConfig& c);
Json to_json(const EncoderConfig& c);
Json to_json(const TrainConfig& c);
Json to_json(const EvalConfig& c);
Json to_json(const ExperimentConfig& c);

// Each parser reads an object rooted at `pointer` and validates it; errors
// are kConfigError with the full pointer.
GridConfig parse_grid_config(const Json& j, const std::string& pointer = "");
LossSpec parse_loss_spec(const Json& j, const std::string& pointer = "");
SvmConfig parse_svm_config(const Json& j, const std::string& pointer = "");
ToyDataConfig parse_toy_data_config(const Json& j, const std::string& pointer = "");
EncoderConfig parse_encoder_config(const Json& j, const std::string& pointer = "");
TrainConfig parse_train_config(const Json& j, const ToyDataConfig& data,
                               const std::string& pointer = "");
EvalConfig parse_eval_config(const Json& j, const std::string& pointer = "");
ExperimentConfig parse_experiment(const Json& j);

// Reads and parses a configuration file; kParseError for malformed JSON or
// an unreadable file. An empty path yields the defaults.
ExperimentConfig load_experiment(const std::filesystem::path& path);

// 64-bit FNV-1a of the text, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view text);
// Digest of the compact serialisation (object keys sorted).
std::string config_digest(const Json& j);

}  // namespace icclab

#endif  // ICCLAB_CONFIG_IO_HPP_
