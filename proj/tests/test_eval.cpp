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
#include <random>

#include "doctest.h"
#include "maskunify/eval.hpp"
#include "oracles.hpp"

using namespace maskunify;

namespace {

// Pred/gt pair on a 20x1 strip whose IoU is exactly inter / uni.
std::pair<BinaryMask, BinaryMask> strip_pair(int inter, int uni) {
  BinaryMask gt(Size{20, 1});
  BinaryMask pred(Size{20, 1});
  for (int x = 0; x < uni; ++x) gt.set(x, 0);
  for (int x = uni - inter; x < uni; ++x) pred.set(x, 0);
  return {pred, gt};
}

double metric(const EvalReport& r, const std::string& name) {
  const auto v = r.get(name);
  REQUIRE(v.has_value());
  return *v;
}

BBox random_box(std::mt19937_64& rng, int extent) {
  std::uniform_int_distribution<int> d(0, extent - 1);
  int a = d(rng), b = d(rng), c = d(rng), e = d(rng);
  return BBox{std::min(a, b), std::min(c, e), std::max(a, b), std::max(c, e)};
}

}  // namespace

TEST_CASE("seg_metrics on identical masks") {
  std::mt19937_64 rng(79);
  std::vector<std::pair<BinaryMask, BinaryMask>> pairs;
  for (int i = 0; i < 10; ++i) {
    auto m = oracle::random_mask(rng, Size{12, 9}, 0.4);
    m.set(0, 0);
    pairs.emplace_back(m, m);
  }
  const auto r = seg_metrics(pairs);
  CHECK(r.sample_count == 10);
  for (const char* k : {"Pr@0.5", "Pr@0.6", "Pr@0.7", "Pr@0.8", "Pr@0.9", "oIoU", "mIoU"}) {
    CHECK(metric(r, k) == 1.0);
  }
}

TEST_CASE("seg_metrics hand example") {
  // IoUs 11/20 = 0.55 and 19/20 = 0.95.
  const std::vector<std::pair<BinaryMask, BinaryMask>> pairs = {strip_pair(11, 20),
                                                                strip_pair(19, 20)};
  const auto r = seg_metrics(pairs);
  CHECK(metric(r, "mIoU") == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(metric(r, "oIoU") == doctest::Approx(30.0 / 40.0).epsilon(1e-12));
  CHECK(metric(r, "Pr@0.5") == 1.0);
  CHECK(metric(r, "Pr@0.6") == 0.5);
  CHECK(metric(r, "Pr@0.9") == 0.5);

  // IoU exactly on a threshold counts only under the inclusive rule.
  const std::vector<std::pair<BinaryMask, BinaryMask>> edge = {strip_pair(10, 20)};
  CHECK(metric(seg_metrics(edge), "Pr@0.5") == 0.0);
  CHECK(metric(seg_metrics(edge, ThresholdRule::kInclusive), "Pr@0.5") == 1.0);
  CHECK(format_seg_table(r).find("75.00") != std::string::npos);
}

TEST_CASE("seg_metrics against a pixel tally") {
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<BinaryMask, BinaryMask>> pairs;
    for (int i = 0; i < 25; ++i) {
      const auto size = oracle::random_size(rng, 4, 40);
      pairs.emplace_back(oracle::random_mask(rng, size, 0.5), oracle::random_mask(rng, size, 0.5));
    }
    const auto tally = oracle::pixel_tally(pairs);
    long double miou = 0.0L;
    std::array<int, 5> above{};
    for (const auto& [p, g] : pairs) {
      std::uint64_t in = 0, un = 0;
      for (int y = 0; y < p.height(); ++y) {
        for (int x = 0; x < p.width(); ++x) {
          in += oracle::pixel(p, x, y) && oracle::pixel(g, x, y);
          un += oracle::pixel(p, x, y) || oracle::pixel(g, x, y);
        }
      }
      const long double iou = un == 0 ? 1.0L : static_cast<long double>(in) / un;
      miou += iou;
      for (std::size_t t = 0; t < 5; ++t) above[t] += iou > kPrecisionThresholds[t];
    }
    miou /= pairs.size();
    const auto r = seg_metrics(pairs);
    CHECK(std::abs(metric(r, "oIoU") - static_cast<double>(tally.inter) / tally.uni) <= 1e-9);
    CHECK(std::abs(metric(r, "mIoU") - static_cast<double>(miou)) <= 1e-9);
    double prev = 2.0;
    for (std::size_t t = 0; t < 5; ++t) {
      char name[16];
      std::snprintf(name, sizeof name, "Pr@%.1f", kPrecisionThresholds[t]);
      const double pr = metric(r, name);
      CHECK(pr == doctest::Approx(above[t] / 25.0));
      CHECK(pr <= prev);
      prev = pr;
    }
  }
}

TEST_CASE("SegAccumulator merge equals sequential") {
  std::mt19937_64 rng(89);
  std::vector<std::pair<BinaryMask, BinaryMask>> pairs;
  for (int i = 0; i < 60; ++i) {
    const auto size = oracle::random_size(rng, 2, 20);
    pairs.emplace_back(oracle::random_mask(rng, size, 0.3), oracle::random_mask(rng, size, 0.6));
  }
  SegAccumulator whole;
  for (const auto& [p, g] : pairs) whole.add(p, g);
  SegAccumulator a, b, c;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    (i % 3 == 0 ? a : i % 3 == 1 ? b : c).add(pairs[i].first, pairs[i].second);
  }
  c.merge(a);
  c.merge(b);
  const auto x = whole.finish();
  const auto y = c.finish();
  CHECK(x.metrics == y.metrics);
  CHECK(x.sample_count == y.sample_count);

  SegAccumulator bad;
  CHECK_THROWS_AS(bad.add(BinaryMask(Size{2, 2}), BinaryMask(Size{3, 2})), DimensionMismatch);
}

TEST_CASE("bbox_iou") {
  CHECK(bbox_iou(BBox{0, 0, 9, 9}, BBox{5, 0, 14, 9}) == doctest::Approx(1.0 / 3.0));
  CHECK(bbox_iou(BBox{0, 0, 4, 4}, BBox{0, 0, 4, 4}) == 1.0);
  CHECK(bbox_iou(BBox{0, 0, 4, 4}, BBox{5, 5, 6, 6}) == 0.0);
  std::mt19937_64 rng(97);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_box(rng, 30);
    const auto b = random_box(rng, 30);
    CHECK(bbox_iou(a, b) == doctest::Approx(oracle::box_iou(a, b)).epsilon(1e-12));
    CHECK(bbox_iou(a, b) == bbox_iou(b, a));
  }
}

TEST_CASE("grounding_metrics") {
  // IoU 0.6 (6 of 10 columns shared) and 0.3 (3 of 10).
  const std::vector<std::pair<std::optional<BBox>, BBox>> pairs = {
      {BBox{0, 0, 7, 0}, BBox{2, 0, 9, 0}},
      {BBox{0, 0, 2, 0}, BBox{0, 0, 9, 0}},
  };
  CHECK(bbox_iou(*pairs[0].first, pairs[0].second) == doctest::Approx(0.6));
  const auto r = grounding_metrics(pairs);
  CHECK(metric(r, "AP50") == 0.5);
  CHECK(metric(r, "mIoU") == doctest::Approx(0.45));

  const std::vector<std::pair<std::optional<BBox>, BBox>> missing = {
      {std::nullopt, BBox{0, 0, 3, 3}}, {BBox{0, 0, 3, 3}, BBox{0, 0, 3, 3}}};
  const auto m = grounding_metrics(missing);
  CHECK(metric(m, "AP50") == 0.5);
  CHECK(metric(m, "mIoU") == 0.5);
}

TEST_CASE("detection_ap") {
  const std::vector<std::vector<GroundTruthBox>> gts = {
      {{BBox{0, 0, 9, 9}, "car"}, {BBox{20, 20, 29, 29}, "ship"}},
      {{BBox{5, 5, 14, 14}, "car"}},
  };
  SUBCASE("perfect predictions") {
    const std::vector<std::vector<Detection>> preds = {
        {{BBox{0, 0, 9, 9}, "car", 0.9}, {BBox{20, 20, 29, 29}, "ship", 0.8}},
        {{BBox{5, 5, 14, 14}, "car", 0.7}},
    };
    const auto r = detection_ap(preds, gts);
    CHECK(r.mean_ap == std::optional<double>(1.0));
    CHECK(r.per_category.at("car") == 1.0);
  }
  SUBCASE("no predictions") {
    const std::vector<std::vector<Detection>> preds(2);
    CHECK(detection_ap(preds, gts).mean_ap == std::optional<double>(0.0));
  }
  SUBCASE("no ground truth at all") {
    const std::vector<std::vector<Detection>> preds = {{{BBox{0, 0, 1, 1}, "car", 0.5}}};
    const std::vector<std::vector<GroundTruthBox>> none(1);
    CHECK_FALSE(detection_ap(preds, none).mean_ap.has_value());
  }
  SUBCASE("duplicate predictions count once") {
    const std::vector<std::vector<Detection>> preds = {
        {{BBox{0, 0, 9, 9}, "car", 0.9}, {BBox{0, 0, 9, 9}, "car", 0.8}},
        {{BBox{5, 5, 14, 14}, "car", 0.7}},
    };
    // tp, fp, tp: precision 1 at recall 0.5, 2/3 at recall 1.
    CHECK(detection_ap(preds, gts).per_category.at("car") == doctest::Approx(0.5 + 0.5 * 2.0 / 3.0));
  }
  SUBCASE("sizes must agree") {
    const std::vector<std::vector<Detection>> preds(1);
    CHECK_THROWS(detection_ap(preds, gts));
  }
}

TEST_CASE("detection_ap matches exhaustive search") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 300; ++trial) {
    // Up to 5 disjoint gt boxes over 2 images, one category.
    std::vector<std::vector<GroundTruthBox>> gts(2);
    std::vector<oracle::GtBox> flat_gt;
    const int ngt = 1 + static_cast<int>(rng() % 5);
    for (int g = 0; g < ngt; ++g) {
      const std::size_t img = rng() % 2;
      const int x = 30 * g;
      const BBox b{x, 0, x + 9 + static_cast<int>(rng() % 10), 9 + static_cast<int>(rng() % 10)};
      gts[img].push_back({b, "obj"});
      flat_gt.push_back({img, b});
    }
    std::vector<std::vector<Detection>> preds(2);
    std::vector<oracle::PredBox> flat_pred;
    const int npred = static_cast<int>(rng() % 6);
    std::uniform_int_distribution<int> jitter(-6, 6);
    for (int p = 0; p < npred; ++p) {
      const std::size_t img = rng() % 2;
      const auto& ref = flat_gt[rng() % flat_gt.size()].box;
      BBox b{std::max(0, ref.x_min + jitter(rng)), std::max(0, ref.y_min + jitter(rng)), 0, 0};
      b.x_max = std::max(b.x_min, ref.x_max + jitter(rng));
      b.y_max = std::max(b.y_min, ref.y_max + jitter(rng));
      const double score = static_cast<double>(rng() % 1000) / 1000.0 + p * 1e-6;
      preds[img].push_back({b, "obj", score});
      flat_pred.push_back({img, b, score});
    }
    const auto got = detection_ap(preds, gts);
    REQUIRE(got.mean_ap.has_value());
    CHECK(std::abs(*got.mean_ap - oracle::exhaustive_ap(flat_pred, flat_gt)) <= 1e-12);

    // Scores only matter through their order.
    auto warped = preds;
    for (auto& v : warped)
      for (auto& d : v) d.score = d.score * d.score * 0.5;
    CHECK(detection_ap(warped, gts).mean_ap == got.mean_ap);
  }
}

TEST_CASE("multilabel_accuracy") {
  const std::set<std::string> universe = {"a", "b", "c", "d"};
  using Sets = std::pair<std::set<std::string>, std::set<std::string>>;
  const std::vector<Sets> pairs = {{{"a", "b"}, {"a", "b"}}, {{"a", "c"}, {"a"}}};
  CHECK(*multilabel_accuracy(pairs, universe) == doctest::Approx(0.875));
  CHECK(*multilabel_accuracy(pairs, universe, MultilabelAccuracy::kExactMatch) == 0.5);
  CHECK_FALSE(multilabel_accuracy(std::vector<Sets>{}, universe).has_value());
  const std::vector<Sets> stray = {{{"zzz"}, {}}};
  CHECK_THROWS(multilabel_accuracy(stray, universe));
}

TEST_CASE("counting_accuracy") {
  using P = std::pair<long long, long long>;
  CHECK(*counting_accuracy(std::vector<P>{{3, 3}, {5, 4}}) == 0.5);
  CHECK_FALSE(counting_accuracy(std::vector<P>{}).has_value());
  // Tolerance: ceil(0.1 * gt) -> 1 for gt in 1..10, 2 for 11..20.
  const std::vector<P> tol = {{5, 4}, {6, 4}, {18, 20}, {17, 20}, {0, 0}, {1, 0}};
  CHECK(*counting_accuracy(tol, CountingAccuracy::kRelativeTolerance) == doctest::Approx(3.0 / 6.0));
}
