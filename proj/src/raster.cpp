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

#include "maskunify/raster.hpp"

#include <algorithm>
#include <cmath>

namespace maskunify {

namespace {

void check_size(Size size) {
  if (size.width <= 0 || size.height <= 0) {
    throw std::invalid_argument("raster dimensions must be positive, got " +
                                std::to_string(size.width) + "x" +
                                std::to_string(size.height));
  }
}

}  // namespace

ProbMap::ProbMap(Size size, std::vector<double> values, std::string label)
    : size_(size), values_(std::move(values)), label_(std::move(label)) {
  check_size(size_);
  if (values_.size() != size_.area()) {
    throw std::invalid_argument("probability map holds " +
                                std::to_string(values_.size()) +
                                " values, expected " +
                                std::to_string(size_.area()));
  }
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("probability value outside [0,1]");
    }
  }
}

ProbMap::ProbMap(Size size, double fill, std::string label)
    : ProbMap(size, std::vector<double>(size.width > 0 && size.height > 0
                                            ? size.area()
                                            : 0,
                                        fill),
              std::move(label)) {}

BinaryMask::BinaryMask(Size size, bool fill) : size_(size) {
  check_size(size_);
  bits_.assign(size_.area(), fill ? 1 : 0);
}

BinaryMask::BinaryMask(Size size, std::vector<std::uint8_t> bits)
    : size_(size), bits_(std::move(bits)) {
  check_size(size_);
  if (bits_.size() != size_.area()) {
    throw std::invalid_argument("mask holds " + std::to_string(bits_.size()) +
                                " pixels, expected " +
                                std::to_string(size_.area()));
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(
      std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryMask binarize(const ProbMap& map, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw std::invalid_argument("binarize threshold outside [0,1]");
  }
  std::vector<std::uint8_t> bits(map.size().area());
  auto values = map.values();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    bits[i] = values[i] >= threshold ? 1 : 0;
  }
  return BinaryMask(map.size(), std::move(bits));
}

OverlapCounts mask_overlap(const BinaryMask& a, const BinaryMask& b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch("mask dimensions differ: " +
                            std::to_string(a.width()) + "x" +
                            std::to_string(a.height()) + " vs " +
                            std::to_string(b.width()) + "x" +
                            std::to_string(b.height()));
  }
  OverlapCounts out;
  auto pa = a.bits();
  auto pb = b.bits();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    out.intersection += static_cast<std::size_t>(pa[i] & pb[i]);
    out.uni += static_cast<std::size_t>(pa[i] | pb[i]);
  }
  return out;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  const auto c = mask_overlap(a, b);
  if (c.uni == 0) return 1.0;
  return static_cast<double>(c.intersection) / static_cast<double>(c.uni);
}

}  // namespace maskunify
