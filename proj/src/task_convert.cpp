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

#include "maskunify/task_convert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "maskunify/refine.hpp"

namespace maskunify {

namespace {

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
  }
}

// Indices of per_class sorted by category; rejects mismatched shapes and
// repeated categories.
std::vector<std::size_t> checked_order(std::span<const ClassMap> per_class) {
  std::vector<std::size_t> order(per_class.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return per_class[a].category < per_class[b].category;
  });
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& cm = per_class[order[i]];
    if (cm.map.size() != per_class[order[0]].map.size()) {
      throw DimensionMismatch("probability map for '" + cm.category +
                              "' does not match the other class maps");
    }
    if (i > 0 && cm.category == per_class[order[i - 1]].category) {
      throw std::invalid_argument("duplicate category '" + cm.category + "'");
    }
  }
  return order;
}

bool passes_gate(const ProbMap& map, const ConversionConfig& config) {
  return aggregate_confidence(map, config.lambda_multilabel) >= config.tau_seg;
}

}  // namespace

std::string_view to_string(ClassificationStrategy s) {
  return s == ClassificationStrategy::kProbLevel ? "prob-level" : "mask-level";
}

ClassificationStrategy parse_strategy(std::string_view s) {
  if (s == "prob-level" || s == "prob") return ClassificationStrategy::kProbLevel;
  if (s == "mask-level" || s == "mask") return ClassificationStrategy::kMaskLevel;
  throw std::invalid_argument("unknown classification strategy '" +
                              std::string(s) + "'");
}

void ConversionConfig::validate() const {
  check_unit(tau_seg, "tau_seg");
  check_unit(tau_cls, "tau_cls");
  check_unit(lambda_multilabel, "lambda_multilabel");
  check_unit(lambda_scene, "lambda_scene");
  if (marker_radius < 0) throw std::invalid_argument("marker_radius must be >= 0");
}

std::uint16_t SemSegMap::label_of(std::string_view category) const {
  const auto it = std::lower_bound(classes.begin(), classes.end(), category);
  if (it == classes.end() || *it != category) return 0;
  return static_cast<std::uint16_t>(it - classes.begin() + 1);
}

BinaryMask SemSegMap::mask_for(std::string_view category) const {
  BinaryMask out(size);
  const auto l = label_of(category);
  if (l == 0) return out;
  auto bits = out.mutable_bits();
  for (std::size_t i = 0; i < labels.size(); ++i) bits[i] = labels[i] == l;
  return out;
}

double aggregate_confidence(const ProbMap& map, double lambda) {
  check_unit(lambda, "lambda");
  const auto v = map.values();
  // Neumaier-compensated sum keeps the mean exact to rounding for large maps.
  double sum = 0.0;
  double comp = 0.0;
  double lo = v.front();
  double hi = v.front();
  for (double x : v) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const double mean = (sum + comp) / static_cast<double>(v.size());
  const double s = lambda * mean + (1.0 - lambda) * hi;
  return std::clamp(s, lo, hi);
}

std::optional<BBox> mask_to_bbox(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  const auto bits = mask.bits();
  BBox box{w, h, -1, -1};
  for (int y = 0; y < h; ++y) {
    const auto row = bits.subspan(static_cast<std::size_t>(y) * w, w);
    const auto first = std::find(row.begin(), row.end(), std::uint8_t{1});
    if (first == row.end()) continue;
    const auto last = std::find(row.rbegin(), row.rend(), std::uint8_t{1});
    box.y_min = std::min(box.y_min, y);
    box.y_max = y;
    box.x_min = std::min(box.x_min, static_cast<int>(first - row.begin()));
    box.x_max = std::max(box.x_max, static_cast<int>(row.rend() - last) - 1);
  }
  if (box.y_max < 0) return std::nullopt;
  return box;
}

SemSegMap semantic_segmentation(std::span<const ClassMap> per_class,
                                const ConversionConfig& config) {
  config.validate();
  if (per_class.empty()) throw std::invalid_argument("no class maps given");
  const auto order = checked_order(per_class);
  if (order.size() > 65535) throw std::invalid_argument("too many classes");

  SemSegMap out;
  out.size = per_class[order[0]].map.size();
  out.labels.assign(out.size.area(), 0);
  std::vector<double> best(out.size.area(), -1.0);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& cm = per_class[order[k]];
    out.classes.push_back(cm.category);
    if (!passes_gate(cm.map, config)) continue;
    const auto label = static_cast<std::uint16_t>(k + 1);
    const auto v = cm.map.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      // Strict > leaves exact ties with the lexicographically earlier class.
      if (v[i] >= config.tau_seg && v[i] > best[i]) {
        best[i] = v[i];
        out.labels[i] = label;
      }
    }
  }
  return out;
}

std::vector<Detection> detect_objects(std::span<const ClassMap> per_class,
                                      const ConversionConfig& config) {
  config.validate();
  std::vector<Detection> out;
  if (per_class.empty()) return out;
  for (const auto idx : checked_order(per_class)) {
    const auto& cm = per_class[idx];
    if (!passes_gate(cm.map, config)) continue;
    const auto mask = binarize(cm.map, config.tau_seg);
    auto pieces = label_components(mask, config.connectivity);
    if (pieces.count() == 0) continue;
    if (config.refine) {
      const auto markers = find_markers(cm.map, config.tau_seg,
                                        config.marker_radius, config.connectivity);
      pieces = split_by_markers(pieces, markers, config.connectivity);
    }
    std::vector<double> sums(pieces.count(), 0.0);
    const auto v = cm.map.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (pieces.labels[i] > 0) sums[pieces.labels[i] - 1] += v[i];
    }
    for (std::size_t p = 0; p < pieces.count(); ++p) {
      const auto& s = pieces.stats[p];
      const double score =
          std::clamp(sums[p] / static_cast<double>(s.pixel_count), 0.0, 1.0);
      out.push_back(Detection{s.box, cm.category, score});
    }
  }
  return out;
}

std::set<std::string> multilabel_classify(std::span<const ClassMap> per_class,
                                          const ConversionConfig& config) {
  config.validate();
  std::set<std::string> out;
  for (const auto& cm : per_class) {
    bool positive = false;
    if (config.classification_strategy == ClassificationStrategy::kProbLevel) {
      positive = aggregate_confidence(cm.map, config.lambda_multilabel) >= config.tau_cls;
    } else {
      positive = binarize(cm.map, config.tau_seg).count() > config.area_threshold_masklevel;
    }
    if (positive) out.insert(cm.category);
  }
  return out;
}

std::string scene_classify(std::span<const ClassMap> per_class,
                           const ConversionConfig& config) {
  config.validate();
  if (per_class.empty()) {
    throw std::invalid_argument("scene classification needs at least one class");
  }
  const std::string* best = nullptr;
  double best_score = -1.0;
  for (const auto& cm : per_class) {
    const double s = aggregate_confidence(cm.map, config.lambda_scene);
    if (s > best_score || (s == best_score && cm.category < *best)) {
      best_score = s;
      best = &cm.category;
    }
  }
  return *best;
}

std::size_t count_objects(std::span<const Detection> detections,
                          std::string_view target) {
  return static_cast<std::size_t>(
      std::count_if(detections.begin(), detections.end(),
                    [&](const Detection& d) { return d.category == target; }));
}

ImageOutputs convert_image(std::span<const ClassMap> per_class,
                           const ConversionConfig& config) {
  ImageOutputs out;
  out.semseg = semantic_segmentation(per_class, config);
  out.detections = detect_objects(per_class, config);
  out.labels = multilabel_classify(per_class, config);
  out.scene = scene_classify(per_class, config);
  for (const auto& cm : per_class) {
    out.label_scores[cm.category] = aggregate_confidence(cm.map, config.lambda_multilabel);
    out.scene_scores[cm.category] = aggregate_confidence(cm.map, config.lambda_scene);
    out.counts[cm.category] = count_objects(out.detections, cm.category);
  }
  out.caption = generate_caption(out.labels, out.counts, out.detections,
                                 out.semseg.size);
  return out;
}

}  // namespace maskunify
