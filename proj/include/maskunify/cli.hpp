// Copyright 2026 The maskunify Authors.
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

#ifndef MASKUNIFY_CLI_HPP_
#define MASKUNIFY_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "maskunify/data_engine.hpp"
#include "maskunify/eval.hpp"
#include "maskunify/task_convert.hpp"

namespace maskunify::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,
  kDataError = 2,
  kServiceError = 3,
};

struct RunConfig {
  std::string subcommand;  // convert | eval | curate | stats
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path output;
  std::filesystem::path config_file;

  ConversionConfig conversion;
  FilterConfig filter;
  std::size_t workers = 1;
  std::uint64_t seed = 0;

  // convert
  std::vector<std::string> categories;

  // eval
  std::filesystem::path ground_truth;
  ThresholdRule pr_rule = ThresholdRule::kStrict;
  MultilabelAccuracy multilabel_mode = MultilabelAccuracy::kPerClass;
  CountingAccuracy counting_mode = CountingAccuracy::kExact;

  // curate / stats
  std::filesystem::path vocab;
  std::size_t zero_per_image = 0;
  bool scorer_stub = false;
  std::string scorer_url;
  int scorer_timeout_ms = 10000;
  int scorer_retries = 2;
  std::filesystem::path image_root;
};

// Files written by each subcommand inside RunConfig::output.
inline constexpr const char* kPredictionsFile = "predictions.jsonl";
inline constexpr const char* kMasksFile = "masks.jsonl";
inline constexpr const char* kSemsegDir = "semseg";
inline constexpr const char* kSummaryFile = "summary.json";
inline constexpr const char* kReportJson = "report.json";
inline constexpr const char* kReportText = "report.txt";
inline constexpr const char* kAcceptedFile = "accepted.jsonl";
inline constexpr const char* kRejectedFile = "rejected.jsonl";
inline constexpr const char* kCoverageJson = "coverage.json";
inline constexpr const char* kCoverageText = "coverage.txt";

int cmd_convert(const RunConfig& config, std::ostream& log);
int cmd_eval(const RunConfig& config, std::ostream& log);
int cmd_curate(const RunConfig& config, std::ostream& log);
int cmd_stats(const RunConfig& config, std::ostream& log);

// Parses argv (flags > --config file > defaults) and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Sorted image ids (sub-directory names) under a probability-map root.
std::vector<std::string> list_image_ids(const std::filesystem::path& root);

// Record key used to align prediction and ground-truth manifests:
// image_id (or image), plus the expression when present.
std::string record_key(const Json& record);

}  // namespace maskunify::cli

#endif  // MASKUNIFY_CLI_HPP_
