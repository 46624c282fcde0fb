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

#ifndef MASKUNIFY_TASK_CONVERT_HPP_
#define MASKUNIFY_TASK_CONVERT_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maskunify/components.hpp"
#include "maskunify/raster.hpp"

namespace maskunify {

enum class ClassificationStrategy { kProbLevel, kMaskLevel };

std::string_view to_string(ClassificationStrategy s);
ClassificationStrategy parse_strategy(std::string_view s);

// Thresholds and pooling weights for turning probability maps into task
// outputs. The defaults are the published operating point: tau_cls 0.5,
// lambda 0.5 for multi-label and 1.0 for scene classification.
struct ConversionConfig {
  double tau_seg = 0.5;
  double tau_cls = 0.5;
  double lambda_multilabel = 0.5;
  double lambda_scene = 1.0;
  ClassificationStrategy classification_strategy =
      ClassificationStrategy::kProbLevel;
  std::size_t area_threshold_masklevel = 0;

  // Marker-based splitting of merged adjacent objects before box extraction.
  bool refine = true;
  int marker_radius = 5;
  Connectivity connectivity = Connectivity::kEight;

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct ClassMap {
  std::string category;
  ProbMap map;
};

struct Detection {
  BBox bbox;
  std::string category;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

// Label raster: 0 is background, k > 0 is classes[k - 1]. Classes are kept in
// lexicographic order.
struct SemSegMap {
  Size size;
  std::vector<std::string> classes;
  std::vector<std::uint16_t> labels;

  std::uint16_t label_of(std::string_view category) const;
  BinaryMask mask_for(std::string_view category) const;
};

// S = lambda * mean(P) + (1 - lambda) * max(P).
double aggregate_confidence(const ProbMap& map, double lambda);

std::optional<BBox> mask_to_bbox(const BinaryMask& mask);

SemSegMap semantic_segmentation(std::span<const ClassMap> per_class,
                                const ConversionConfig& config);

std::vector<Detection> detect_objects(std::span<const ClassMap> per_class,
                                      const ConversionConfig& config);

std::set<std::string> multilabel_classify(std::span<const ClassMap> per_class,
                                          const ConversionConfig& config);

// Highest pooled confidence (lambda_scene); ties go to the lexicographically
// smallest category.
std::string scene_classify(std::span<const ClassMap> per_class,
                           const ConversionConfig& config);

std::size_t count_objects(std::span<const Detection> detections,
                          std::string_view target);

std::string generate_caption(const std::set<std::string>& labels,
                             const std::map<std::string, std::size_t>& counts,
                             std::span<const Detection> boxes, Size image);

// Grid cell name ("top left" ... "bottom right") of a box centre.
std::string grid_position(const BBox& box, Size image);

struct ImageOutputs {
  SemSegMap semseg;
  std::vector<Detection> detections;
  std::set<std::string> labels;
  std::map<std::string, double> label_scores;
  std::string scene;
  std::map<std::string, double> scene_scores;
  std::map<std::string, std::size_t> counts;
  std::string caption;
};

// Runs every conversion for one image.
ImageOutputs convert_image(std::span<const ClassMap> per_class,
                           const ConversionConfig& config);

}  // namespace maskunify

#endif  // MASKUNIFY_TASK_CONVERT_HPP_
