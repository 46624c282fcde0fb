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

#ifndef MASKUNIFY_EVAL_HPP_
#define MASKUNIFY_EVAL_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "maskunify/manifest.hpp"
#include "maskunify/raster.hpp"
#include "maskunify/task_convert.hpp"

namespace maskunify {

// Named metric values for one task family, in insertion order.
struct EvalReport {
  std::size_t sample_count = 0;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<double> per_sample;  // optional detail (IoU per pair, ...)

  std::optional<double> get(std::string_view name) const;
  void set(std::string name, double value);
  Json to_json() const;
};

// Pr@tau compares IoU against tau strictly by default.
enum class ThresholdRule { kStrict, kInclusive };

inline constexpr std::array<double, 5> kPrecisionThresholds = {0.5, 0.6, 0.7, 0.8, 0.9};

// Streaming accumulator behind seg_metrics. Partial accumulators over
// disjoint subsets merge to exactly the sequential result.
class SegAccumulator {
 public:
  void add(const BinaryMask& pred, const BinaryMask& gt);
  void merge(const SegAccumulator& other);
  EvalReport finish(ThresholdRule rule = ThresholdRule::kStrict) const;

 private:
  std::uint64_t intersection_ = 0;
  std::uint64_t union_ = 0;
  std::vector<double> ious_;
};

// oIoU, mIoU and Pr@0.5..0.9.
EvalReport seg_metrics(std::span<const std::pair<BinaryMask, BinaryMask>> pairs,
                       ThresholdRule rule = ThresholdRule::kStrict);

// Inclusive-pixel intersection over union.
double bbox_iou(const BBox& a, const BBox& b);

// One predicted box per expression; a missing prediction scores IoU 0.
// Reports AP50 (fraction with IoU > 0.5) and mIoU.
EvalReport grounding_metrics(
    std::span<const std::pair<std::optional<BBox>, BBox>> pairs);

struct GroundTruthBox {
  BBox bbox;
  std::string category;
};

struct ApResult {
  std::optional<double> mean_ap;  // none when no category has ground truth
  std::map<std::string, double> per_category;
};

// Per-category all-point interpolated AP with greedy score-ordered matching
// (IoU strictly above iou_threshold), averaged over categories present in
// the ground truth. preds[i] and gts[i] belong to the same image.
ApResult detection_ap(std::span<const std::vector<Detection>> preds,
                      std::span<const std::vector<GroundTruthBox>> gts,
                      double iou_threshold = 0.5);

std::optional<double> detection_ap50(std::span<const std::vector<Detection>> preds,
                                     std::span<const std::vector<GroundTruthBox>> gts);

enum class MultilabelAccuracy { kPerClass, kExactMatch };

// Per-class: mean over samples of the fraction of universe labels on which
// prediction and truth agree. Exact-match: fraction of identical sets.
// None for an empty sample list.
std::optional<double> multilabel_accuracy(
    std::span<const std::pair<std::set<std::string>, std::set<std::string>>> pairs,
    const std::set<std::string>& universe,
    MultilabelAccuracy mode = MultilabelAccuracy::kPerClass);

enum class CountingAccuracy { kExact, kRelativeTolerance };

// Exact: fraction with pred == gt. Tolerance: |pred - gt| <= ceil(0.1 * gt).
// None for an empty sample list.
std::optional<double> counting_accuracy(
    std::span<const std::pair<long long, long long>> pairs,
    CountingAccuracy mode = CountingAccuracy::kExact);

// Percent table with the usual RES column layout.
std::string format_seg_table(const EvalReport& report);

}  // namespace maskunify

#endif  // MASKUNIFY_EVAL_HPP_
