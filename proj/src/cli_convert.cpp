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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>

#include "maskunify/cli.hpp"
#include "maskunify/manifest.hpp"
#include "maskunify/parallel.hpp"
#include "maskunify/pnm.hpp"
#include "maskunify/rle.hpp"

namespace maskunify::cli {

namespace fs = std::filesystem;

namespace {

struct ImageResult {
  std::string image_id;
  std::optional<std::string> error;
  Json prediction;
  std::vector<Json> masks;
  PnmImage semseg;
};

ProbMap load_class_map(const fs::path& dir, const std::string& category) {
  const auto pgm = dir / (category + ".pgm");
  const auto rle = dir / (category + ".json");
  std::error_code ec;
  if (fs::is_regular_file(pgm, ec)) return load_prob_map(pgm, category);
  if (fs::is_regular_file(rle, ec)) {
    std::ifstream in(rle);
    Json j;
    in >> j;
    const auto mask = mask_from_json(j);
    std::vector<double> values(mask.bits().begin(), mask.bits().end());
    return ProbMap(mask.size(), std::move(values), category);
  }
  throw std::runtime_error("missing probability map for '" + category + "'");
}

ImageResult convert_one(const fs::path& root, const std::string& image_id,
                        const RunConfig& config) {
  ImageResult r;
  r.image_id = image_id;
  std::vector<ClassMap> maps;
  maps.reserve(config.categories.size());
  for (const auto& cat : config.categories) {
    maps.push_back(ClassMap{cat, load_class_map(root / image_id, cat)});
  }
  const auto out = convert_image(maps, config.conversion);
  const Size size = out.semseg.size;

  Json dets = Json::array();
  for (const auto& d : out.detections) dets.push_back(detection_to_json(d));
  std::vector<std::string> legend = {"background"};
  legend.insert(legend.end(), out.semseg.classes.begin(), out.semseg.classes.end());
  r.prediction = Json{
      {"image_id", image_id},
      {"width", size.width},
      {"height", size.height},
      {"categories", out.semseg.classes},
      {"labels", out.labels},
      {"label_scores", out.label_scores},
      {"scene", out.scene},
      {"scene_scores", out.scene_scores},
      {"counts", out.counts},
      {"detections", dets},
      {"caption", out.caption},
      {"semseg", (fs::path(kSemsegDir) / (image_id + ".pgm")).generic_string()},
      {"semseg_classes", legend},
  };

  for (const auto& cat : out.semseg.classes) {
    r.masks.push_back(Json{{"image_id", image_id},
                           {"image", image_id},
                           {"expression", category_expression(cat)},
                           {"mask", mask_to_json(out.semseg.mask_for(cat))},
                           {"strategy", "one-to-many"},
                           {"categories", Json::array({cat})},
                           {"attributes", Json::array()}});
  }

  r.semseg.size = size;
  r.semseg.channels = 1;
  r.semseg.maxval = out.semseg.classes.size() < 256 ? 255 : 65535;
  r.semseg.samples.assign(out.semseg.labels.begin(), out.semseg.labels.end());
  return r;
}

}  // namespace

std::vector<std::string> list_image_ids(const fs::path& root) {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) ids.push_back(entry.path().filename().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

int cmd_convert(const RunConfig& config, std::ostream& log) {
  if (config.inputs.size() != 1 || !fs::is_directory(config.inputs.front())) {
    log << "error: convert expects one probability-map directory as --input\n";
    return kUsageError;
  }
  if (config.categories.empty()) {
    log << "error: convert needs --categories\n";
    return kUsageError;
  }
  {
    auto sorted = config.categories;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      log << "error: duplicate category in --categories\n";
      return kUsageError;
    }
  }
  const fs::path root = config.inputs.front();
  const auto ids = list_image_ids(root);
  fs::create_directories(config.output / kSemsegDir);

  std::vector<ImageResult> results(ids.size());
  parallel_for(ids.size(), config.workers, [&](std::size_t i) {
    try {
      results[i] = convert_one(root, ids[i], config);
      write_file_bytes(config.output / kSemsegDir / (ids[i] + ".pgm"),
                       encode_pnm(results[i].semseg));
      results[i].semseg = {};
    } catch (const std::exception& e) {
      results[i] = ImageResult{};
      results[i].image_id = ids[i];
      results[i].error = e.what();
    }
  });

  std::vector<Json> predictions;
  std::vector<Json> masks;
  Json failures = Json::array();
  for (auto& r : results) {
    if (r.error) {
      log << "warning: image " << r.image_id << ": " << *r.error << '\n';
      failures.push_back(Json{{"image_id", r.image_id}, {"error", *r.error}});
      continue;
    }
    predictions.push_back(std::move(r.prediction));
    for (auto& m : r.masks) masks.push_back(std::move(m));
  }
  write_jsonl(config.output / kPredictionsFile, predictions);
  write_jsonl(config.output / kMasksFile, masks);
  const Json summary{{"images", ids.size()},
                     {"succeeded", predictions.size()},
                     {"failed", failures.size()},
                     {"failures", failures}};
  write_file_bytes(config.output / kSummaryFile, summary.dump(2) + "\n");

  if (ids.empty()) {
    log << "warning: no image directories under " << root.string() << '\n';
    return kOk;
  }
  return predictions.empty() ? kDataError : kOk;
}

}  // namespace maskunify::cli
