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

#include "maskunify/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <tuple>

namespace maskunify {

namespace {

std::string pr_name(double tau) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "Pr@%.1f", tau);
  return buf;
}

// Summation order fixed by sorting, so any partition of the samples yields
// the same bits.
double ordered_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

std::optional<double> EvalReport::get(std::string_view name) const {
  for (const auto& [k, v] : metrics) {
    if (k == name) return v;
  }
  return std::nullopt;
}

void EvalReport::set(std::string name, double value) {
  for (auto& [k, v] : metrics) {
    if (k == name) {
      v = value;
      return;
    }
  }
  metrics.emplace_back(std::move(name), value);
}

Json EvalReport::to_json() const {
  Json m = Json::object();
  for (const auto& [k, v] : metrics) m[k] = v;
  return Json{{"samples", sample_count}, {"metrics", m}};
}

void SegAccumulator::add(const BinaryMask& pred, const BinaryMask& gt) {
  const auto c = mask_overlap(pred, gt);
  intersection_ += c.intersection;
  union_ += c.uni;
  ious_.push_back(c.uni == 0 ? 1.0
                             : static_cast<double>(c.intersection) /
                                   static_cast<double>(c.uni));
}

void SegAccumulator::merge(const SegAccumulator& other) {
  intersection_ += other.intersection_;
  union_ += other.union_;
  ious_.insert(ious_.end(), other.ious_.begin(), other.ious_.end());
}

EvalReport SegAccumulator::finish(ThresholdRule rule) const {
  EvalReport r;
  r.sample_count = ious_.size();
  r.per_sample = ious_;
  if (ious_.empty()) return r;
  for (double tau : kPrecisionThresholds) {
    const auto hits = std::count_if(ious_.begin(), ious_.end(), [&](double iou) {
      return rule == ThresholdRule::kStrict ? iou > tau : iou >= tau;
    });
    r.set(pr_name(tau), static_cast<double>(hits) / static_cast<double>(ious_.size()));
  }
  r.set("oIoU", union_ == 0 ? 1.0
                            : static_cast<double>(intersection_) /
                                  static_cast<double>(union_));
  r.set("mIoU", ordered_mean(ious_));
  return r;
}

EvalReport seg_metrics(std::span<const std::pair<BinaryMask, BinaryMask>> pairs,
                       ThresholdRule rule) {
  SegAccumulator acc;
  for (const auto& [pred, gt] : pairs) acc.add(pred, gt);
  return acc.finish(rule);
}

double bbox_iou(const BBox& a, const BBox& b) {
  const long long iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min) + 1;
  const long long ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min) + 1;
  const long long inter = (iw > 0 && ih > 0) ? iw * ih : 0;
  const long long uni = a.area() + b.area() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

EvalReport grounding_metrics(
    std::span<const std::pair<std::optional<BBox>, BBox>> pairs) {
  EvalReport r;
  r.sample_count = pairs.size();
  if (pairs.empty()) return r;
  std::size_t hits = 0;
  for (const auto& [pred, gt] : pairs) {
    const double iou = pred ? bbox_iou(*pred, gt) : 0.0;
    r.per_sample.push_back(iou);
    if (iou > 0.5) ++hits;
  }
  r.set("AP50", static_cast<double>(hits) / static_cast<double>(pairs.size()));
  r.set("mIoU", ordered_mean(r.per_sample));
  return r;
}

ApResult detection_ap(std::span<const std::vector<Detection>> preds,
                      std::span<const std::vector<GroundTruthBox>> gts,
                      double iou_threshold) {
  if (preds.size() != gts.size()) {
    throw std::invalid_argument("prediction and ground-truth image counts differ");
  }
  std::set<std::string> categories;
  for (const auto& img : gts) {
    for (const auto& g : img) categories.insert(g.category);
  }

  ApResult out;
  for (const auto& cat : categories) {
    struct Candidate {
      double score;
      std::size_t image;
      std::size_t index;
    };
    std::vector<Candidate> cands;
    std::size_t n_gt = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
      for (std::size_t k = 0; k < preds[i].size(); ++k) {
        if (preds[i][k].category == cat) cands.push_back({preds[i][k].score, i, k});
      }
      for (const auto& g : gts[i]) n_gt += g.category == cat;
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& a, const Candidate& b) { return a.score > b.score; });

    std::vector<std::vector<bool>> used(gts.size());
    for (std::size_t i = 0; i < gts.size(); ++i) used[i].assign(gts[i].size(), false);
    std::vector<double> precision;
    std::vector<double> recall;
    std::size_t tp = 0;
    for (std::size_t n = 0; n < cands.size(); ++n) {
      const auto& c = cands[n];
      const auto& box = preds[c.image][c.index].bbox;
      double best = iou_threshold;
      std::optional<std::size_t> match;
      for (std::size_t g = 0; g < gts[c.image].size(); ++g) {
        const auto& gt = gts[c.image][g];
        if (gt.category != cat || used[c.image][g]) continue;
        const double iou = bbox_iou(box, gt.bbox);
        if (iou > best) {
          best = iou;
          match = g;
        }
      }
      if (match) {
        used[c.image][*match] = true;
        ++tp;
      }
      precision.push_back(static_cast<double>(tp) / static_cast<double>(n + 1));
      recall.push_back(static_cast<double>(tp) / static_cast<double>(n_gt));
    }

    // All-point interpolation: precision envelope integrated over recall.
    for (std::size_t n = precision.size(); n-- > 1;) {
      precision[n - 1] = std::max(precision[n - 1], precision[n]);
    }
    double ap = 0.0;
    double prev_recall = 0.0;
    for (std::size_t n = 0; n < precision.size(); ++n) {
      ap += (recall[n] - prev_recall) * precision[n];
      prev_recall = recall[n];
    }
    out.per_category[cat] = ap;
  }
  if (!categories.empty()) {
    double sum = 0.0;
    for (const auto& [cat, ap] : out.per_category) sum += ap;
    out.mean_ap = sum / static_cast<double>(categories.size());
  }
  return out;
}

std::optional<double> detection_ap50(std::span<const std::vector<Detection>> preds,
                                     std::span<const std::vector<GroundTruthBox>> gts) {
  return detection_ap(preds, gts, 0.5).mean_ap;
}

std::optional<double> multilabel_accuracy(
    std::span<const std::pair<std::set<std::string>, std::set<std::string>>> pairs,
    const std::set<std::string>& universe, MultilabelAccuracy mode) {
  if (pairs.empty()) return std::nullopt;
  std::vector<double> per_sample;
  per_sample.reserve(pairs.size());
  for (const auto& [pred, gt] : pairs) {
    for (const auto* s : {&pred, &gt}) {
      for (const auto& label : *s) {
        if (!universe.count(label)) {
          throw std::invalid_argument("label '" + label + "' is outside the universe");
        }
      }
    }
    if (mode == MultilabelAccuracy::kExactMatch) {
      per_sample.push_back(pred == gt ? 1.0 : 0.0);
      continue;
    }
    if (universe.empty()) {
      per_sample.push_back(1.0);
      continue;
    }
    std::size_t agree = 0;
    for (const auto& label : universe) agree += pred.count(label) == gt.count(label);
    per_sample.push_back(static_cast<double>(agree) / static_cast<double>(universe.size()));
  }
  return ordered_mean(std::move(per_sample));
}

std::optional<double> counting_accuracy(
    std::span<const std::pair<long long, long long>> pairs, CountingAccuracy mode) {
  if (pairs.empty()) return std::nullopt;
  std::size_t hits = 0;
  for (const auto& [pred, gt] : pairs) {
    if (mode == CountingAccuracy::kExact) {
      hits += pred == gt;
    } else {
      // ceil(0.1 * gt) in integers
      const long long tol = gt > 0 ? (gt + 9) / 10 : 0;
      hits += std::llabs(pred - gt) <= tol;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

std::string format_seg_table(const EvalReport& report) {
  std::ostringstream out;
  const std::vector<std::string> cols = {"Pr@0.5", "Pr@0.6", "Pr@0.7", "Pr@0.8",
                                         "Pr@0.9", "oIoU",   "mIoU"};
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "\t" : "") << cols[i];
  out << '\n';
  for (std::size_t i = 0; i < cols.size(); ++i) {
    char buf[32];
    const auto v = report.get(cols[i]);
    if (v) {
      std::snprintf(buf, sizeof buf, "%.2f", *v * 100.0);
    } else {
      std::snprintf(buf, sizeof buf, "-");
    }
    out << (i ? "\t" : "") << buf;
  }
  out << '\n';
  return out.str();
}

}  // namespace maskunify
