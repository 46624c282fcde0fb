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
#include <sstream>

#include "maskunify/cli.hpp"
#include "maskunify/manifest.hpp"
#include "maskunify/pnm.hpp"

namespace maskunify::cli {

namespace fs = std::filesystem;

namespace {

struct LoadedManifest {
  std::map<std::string, Json> records;
  std::size_t malformed = 0;
  std::size_t duplicates = 0;
};

LoadedManifest load_keyed(const fs::path& path, const char* role, std::ostream& log) {
  LoadedManifest out;
  for (auto& line : read_jsonl(path)) {
    if (!line.record) {
      log << "warning: " << role << " line " << line.line_number << ": " << line.error << '\n';
      ++out.malformed;
      continue;
    }
    const auto key = record_key(*line.record);
    if (key.empty()) {
      log << "warning: " << role << " line " << line.line_number
          << ": record has no image_id or image\n";
      ++out.malformed;
      continue;
    }
    if (!out.records.emplace(key, std::move(*line.record)).second) {
      log << "warning: " << role << " line " << line.line_number << ": duplicate key '"
          << key << "' ignored\n";
      ++out.duplicates;
    }
  }
  return out;
}

std::set<std::string> label_set(const Json& j) {
  std::set<std::string> out;
  for (const auto& v : j) out.insert(v.get<std::string>());
  return out;
}

std::optional<BBox> box_of(const Json& r) {
  if (r.contains("bbox")) return bbox_from_json(r["bbox"]);
  if (r.contains("mask")) return mask_to_bbox(mask_from_json(r["mask"]));
  return std::nullopt;
}

Json optional_json(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

std::string percent(std::optional<double> v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v * 100.0);
  return buf;
}

}  // namespace

std::string record_key(const Json& record) {
  std::string key;
  if (record.contains("image_id") && record["image_id"].is_string()) {
    key = record["image_id"].get<std::string>();
  } else if (record.contains("image") && record["image"].is_string()) {
    key = record["image"].get<std::string>();
  } else {
    return {};
  }
  if (record.contains("expression") && record["expression"].is_string()) {
    key += '\t';
    key += record["expression"].get<std::string>();
  }
  return key;
}

int cmd_eval(const RunConfig& config, std::ostream& log) {
  if (config.inputs.size() != 1) {
    log << "error: eval expects one prediction manifest as --input\n";
    return kUsageError;
  }
  const auto pred = load_keyed(config.inputs.front(), "prediction", log);
  const auto gt = load_keyed(config.ground_truth, "ground truth", log);

  std::vector<std::string> matched;
  Json unmatched_pred = Json::array();
  Json unmatched_gt = Json::array();
  for (const auto& [k, _] : pred.records) {
    if (gt.records.count(k)) {
      matched.push_back(k);
    } else {
      unmatched_pred.push_back(k);
    }
  }
  for (const auto& [k, _] : gt.records) {
    if (!pred.records.count(k)) unmatched_gt.push_back(k);
  }
  if (matched.empty()) {
    log << "error: prediction and ground-truth manifests share no record keys\n";
    return kDataError;
  }
  const std::size_t unmatched = unmatched_pred.size() + unmatched_gt.size();
  if (unmatched > 0) {
    log << "warning: " << unmatched << " unmatched record(s) excluded\n";
  }

  SegAccumulator seg;
  std::vector<std::pair<std::optional<BBox>, BBox>> grounding;
  std::vector<std::vector<Detection>> det_pred;
  std::vector<std::vector<GroundTruthBox>> det_gt;
  std::vector<std::pair<std::set<std::string>, std::set<std::string>>> multilabel;
  std::set<std::string> universe;
  std::size_t scene_total = 0;
  std::size_t scene_hits = 0;
  std::vector<std::pair<long long, long long>> counts;

  try {
    for (const auto& key : matched) {
      const auto& p = pred.records.at(key);
      const auto& g = gt.records.at(key);
      if (p.contains("mask") && g.contains("mask")) {
        seg.add(mask_from_json(p["mask"]), mask_from_json(g["mask"]));
      }
      // Null ground-truth masks carry no box and are left out of grounding.
      if (auto gbox = box_of(g)) {
        if (p.contains("bbox") || p.contains("mask")) grounding.emplace_back(box_of(p), *gbox);
      }
      if (p.contains("detections") && g.contains("detections")) {
        std::vector<Detection> dp;
        for (const auto& d : p["detections"]) dp.push_back(detection_from_json(d));
        std::vector<GroundTruthBox> dg;
        for (const auto& d : g["detections"]) {
          const auto det = detection_from_json(d);
          dg.push_back(GroundTruthBox{det.bbox, det.category});
        }
        det_pred.push_back(std::move(dp));
        det_gt.push_back(std::move(dg));
      }
      if (p.contains("labels") && g.contains("labels")) {
        auto lp = label_set(p["labels"]);
        auto lg = label_set(g["labels"]);
        universe.insert(lp.begin(), lp.end());
        universe.insert(lg.begin(), lg.end());
        for (const auto* r : {&p, &g}) {
          if (r->contains("categories")) {
            const auto cats = label_set((*r)["categories"]);
            universe.insert(cats.begin(), cats.end());
          }
        }
        multilabel.emplace_back(std::move(lp), std::move(lg));
      }
      if (p.contains("scene") && g.contains("scene")) {
        ++scene_total;
        scene_hits += p["scene"] == g["scene"];
      }
      if (p.contains("counts") && g.contains("counts")) {
        for (const auto& [cat, n] : g["counts"].items()) {
          const long long pc = p["counts"].contains(cat) ? p["counts"][cat].get<long long>() : 0;
          counts.emplace_back(pc, n.get<long long>());
        }
      }
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kDataError;
  }

  const auto seg_report = seg.finish(config.pr_rule);
  const auto ground_report = grounding_metrics(grounding);
  const auto ap = detection_ap(det_pred, det_gt, 0.5);
  const auto ml = multilabel_accuracy(multilabel, universe, config.multilabel_mode);
  std::optional<double> scene_acc;
  if (scene_total > 0) {
    scene_acc = static_cast<double>(scene_hits) / static_cast<double>(scene_total);
  }
  const auto count_acc = counting_accuracy(counts, config.counting_mode);

  Json report{
      {"matched", matched.size()},
      {"unmatched_predictions", unmatched_pred},
      {"unmatched_ground_truth", unmatched_gt},
      {"malformed_lines", pred.malformed + gt.malformed},
      {"segmentation", seg_report.to_json()},
      {"grounding", ground_report.to_json()},
      {"detection",
       {{"samples", det_pred.size()},
        {"AP50", optional_json(ap.mean_ap)},
        {"per_category", ap.per_category}}},
      {"multilabel", {{"samples", multilabel.size()}, {"Acc", optional_json(ml)}}},
      {"scene", {{"samples", scene_total}, {"Acc", optional_json(scene_acc)}}},
      {"counting", {{"samples", counts.size()}, {"Acc", optional_json(count_acc)}}},
  };

  std::ostringstream text;
  text << "Segmentation (" << seg_report.sample_count << " pairs)\n"
       << format_seg_table(seg_report) << '\n'
       << "Grounding (" << ground_report.sample_count << " pairs)\n"
       << "AP50\tmIoU\n"
       << percent(ground_report.get("AP50")) << '\t' << percent(ground_report.get("mIoU"))
       << "\n\n"
       << "Detection (" << det_pred.size() << " images)\nAP50\n"
       << percent(ap.mean_ap) << "\n\n"
       << "Classification\tMulti-label Acc\tScene Acc\tCounting Acc\n"
       << '\t' << percent(ml) << '\t' << percent(scene_acc) << '\t' << percent(count_acc)
       << '\n';

  fs::create_directories(config.output);
  write_file_bytes(config.output / kReportJson, report.dump(2) + "\n");
  write_file_bytes(config.output / kReportText, text.str());
  return kOk;
}

}  // namespace maskunify::cli
