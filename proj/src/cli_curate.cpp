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

#include <map>

#include "maskunify/cli.hpp"
#include "maskunify/manifest.hpp"
#include "maskunify/pnm.hpp"
#include "maskunify/scorer.hpp"

namespace maskunify::cli {

namespace fs = std::filesystem;

namespace {

// FNV-1a of the image reference mixed with the run seed, so one-to-zero
// draws do not depend on record order.
std::uint64_t image_seed(std::uint64_t seed, std::string_view image_ref) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : image_ref) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  std::uint64_t z = h ^ (seed + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct InputError {
  std::string where;
  std::string message;
};

std::vector<Triplet> expand_instances(const Json& r, const Vocab& vocab,
                                      const RunConfig& config) {
  if (!r.contains("image") || !r["image"].is_string()) {
    throw ManifestError("instance record needs a string 'image'");
  }
  const auto image = r["image"].get<std::string>();
  if (!r["instances"].is_array()) throw ManifestError("'instances' must be an array");
  std::vector<CategoryMask> instances;
  std::set<std::string> present;
  for (const auto& inst : r["instances"]) {
    if (!inst.contains("category") || !inst["category"].is_string() || !inst.contains("mask")) {
      throw ManifestError("instance needs 'category' and 'mask'");
    }
    instances.push_back({inst["category"].get<std::string>(), mask_from_json(inst["mask"])});
    present.insert(instances.back().category);
  }
  if (r.contains("categories")) {
    for (const auto& c : r["categories"]) present.insert(c.get<std::string>());
  }
  Size size;
  if (!instances.empty()) {
    size = instances.front().mask.size();
  } else if (r.contains("width") && r.contains("height")) {
    size = Size{r["width"].get<int>(), r["height"].get<int>()};
  } else {
    throw ManifestError("instance record without instances needs width and height");
  }
  auto out = make_one_to_many(image, instances);
  auto zero = make_one_to_zero(image, present, vocab, config.zero_per_image,
                               image_seed(config.seed, image), size);
  for (auto& t : zero) out.push_back(std::move(t));
  return out;
}

Json rejected_json(const RejectedTriplet& r) {
  auto j = triplet_to_json(r.triplet);
  j["score"] = r.score ? Json(*r.score) : Json(nullptr);
  j["iteration"] = r.iteration;
  j["note"] = r.note;
  return j;
}

}  // namespace

int cmd_curate(const RunConfig& config, std::ostream& log) {
  const auto vocab = Vocab::load(config.vocab);

  std::unique_ptr<SimilarityScorer> scorer;
  if (config.scorer_stub) {
    scorer = std::make_unique<KeywordScorer>();
  } else if (config.scorer_url.empty()) {
    log << "error: curate needs --scorer-url, REMOTE_SAM_SCORER_URL or --scorer-stub\n";
    return kUsageError;
  } else {
    HttpScorerOptions opts;
    opts.url = config.scorer_url;
    opts.timeout = std::chrono::milliseconds(config.scorer_timeout_ms);
    opts.retries = config.scorer_retries;
    opts.image_root = config.image_root;
    auto http = std::make_unique<HttpScorer>(opts);
    if (!http->reachable()) {
      log << "error: scorer endpoint " << config.scorer_url << " is unreachable\n";
      return kServiceError;
    }
    scorer = std::move(http);
  }

  std::vector<Triplet> generated;
  std::vector<Triplet> candidates;
  std::vector<InputError> errors;
  std::size_t records = 0;
  for (const auto& input : config.inputs) {
    const auto base = input.parent_path();
    for (auto& line : read_jsonl(input)) {
      const std::string where = input.string() + ":" + std::to_string(line.line_number);
      if (!line.record) {
        errors.push_back({where, line.error});
        continue;
      }
      ++records;
      const Json& r = *line.record;
      try {
        if (r.contains("instances")) {
          for (auto& t : expand_instances(r, vocab, config)) generated.push_back(std::move(t));
        } else if (r.value("strategy", "") == "vlm-attribute") {
          candidates.push_back(triplet_from_json(r, base));
        } else {
          const IndexedRecord rec{line.line_number, r};
          auto ingested = ingest_one_to_one(std::span(&rec, 1), base);
          for (auto& e : ingested.errors) errors.push_back({where, e.message});
          for (auto& t : ingested.triplets) generated.push_back(std::move(t));
        }
      } catch (const std::exception& e) {
        errors.push_back({where, e.what()});
      }
    }
  }
  for (const auto& e : errors) log << "warning: " << e.where << ": " << e.message << '\n';

  auto filtered = filter_pseudo_labels(std::move(candidates), *scorer, config.filter);

  std::vector<Json> accepted;
  std::map<std::string, std::size_t> per_strategy;
  for (const auto* group : {&generated, &filtered.accepted}) {
    for (const auto& t : *group) {
      accepted.push_back(triplet_to_json(t));
      ++per_strategy[std::string(to_string(t.source_strategy))];
    }
  }
  std::vector<Json> rejected;
  std::size_t scorer_errors = 0;
  for (const auto& r : filtered.rejected) {
    rejected.push_back(rejected_json(r));
    scorer_errors += !r.score.has_value();
  }

  fs::create_directories(config.output);
  write_jsonl(config.output / kAcceptedFile, accepted);
  write_jsonl(config.output / kRejectedFile, rejected);
  Json err_list = Json::array();
  for (const auto& e : errors) err_list.push_back(Json{{"where", e.where}, {"error", e.message}});
  const Json summary{{"records", records},
                     {"accepted", accepted.size()},
                     {"rejected", rejected.size()},
                     {"accepted_per_strategy", per_strategy},
                     {"filter_iterations", filtered.iterations},
                     {"scorer_errors", scorer_errors},
                     {"input_errors", err_list}};
  write_file_bytes(config.output / kSummaryFile, summary.dump(2) + "\n");

  if (accepted.empty() && rejected.empty() && !errors.empty()) return kDataError;
  return kOk;
}

int cmd_stats(const RunConfig& config, std::ostream& log) {
  const auto vocab = Vocab::load(config.vocab);
  std::vector<Triplet> triplets;
  Json malformed = Json::array();
  for (const auto& input : config.inputs) {
    for (auto& line : read_jsonl(input)) {
      const std::string where = input.string() + ":" + std::to_string(line.line_number);
      std::string error = line.error;
      if (line.record) {
        try {
          triplets.push_back(triplet_from_json(*line.record, input.parent_path()));
          continue;
        } catch (const std::exception& e) {
          error = e.what();
        }
      }
      log << "warning: " << where << ": " << error << '\n';
      malformed.push_back(Json{{"where", where}, {"error", error}});
    }
  }
  const auto report = coverage_stats(triplets, vocab);
  auto j = report.to_json();
  j["malformed_lines"] = malformed;
  fs::create_directories(config.output);
  write_file_bytes(config.output / kCoverageJson, j.dump(2) + "\n");
  write_file_bytes(config.output / kCoverageText, report.to_table());
  return kOk;
}

}  // namespace maskunify::cli
