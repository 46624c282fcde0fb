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

#ifndef MASKUNIFY_RASTER_HPP_
#define MASKUNIFY_RASTER_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace maskunify {

// Raised when two rasters that must agree on shape do not.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Size {
  int width = 0;
  int height = 0;

  std::size_t area() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  friend bool operator==(const Size&, const Size&) = default;
};

// Per-pixel probability raster for one class or referring expression.
// Row-major, values in [0, 1].
class ProbMap {
 public:
  ProbMap() = default;
  ProbMap(Size size, std::vector<double> values, std::string label = {});
  ProbMap(Size size, double fill, std::string label = {});

  Size size() const { return size_; }
  int width() const { return size_.width; }
  int height() const { return size_.height; }
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  double at(int x, int y) const {
    return values_[static_cast<std::size_t>(y) * size_.width + x];
  }
  std::span<const double> values() const { return values_; }

 private:
  Size size_;
  std::vector<double> values_;
  std::string label_;
};

// {0,1} raster, one byte per pixel, row-major.
class BinaryMask {
 public:
  BinaryMask() = default;
  explicit BinaryMask(Size size, bool fill = false);
  BinaryMask(Size size, std::vector<std::uint8_t> bits);

  Size size() const { return size_; }
  int width() const { return size_.width; }
  int height() const { return size_.height; }

  bool get(int x, int y) const {
    return bits_[static_cast<std::size_t>(y) * size_.width + x] != 0;
  }
  void set(int x, int y, bool v = true) {
    bits_[static_cast<std::size_t>(y) * size_.width + x] = v ? 1 : 0;
  }

  std::span<const std::uint8_t> bits() const { return bits_; }
  std::span<std::uint8_t> mutable_bits() { return bits_; }

  std::size_t count() const;
  bool empty() const { return count() == 0; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  Size size_;
  std::vector<std::uint8_t> bits_;
};

// Axis-aligned box, inclusive pixel coordinates.
struct BBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  int width() const { return x_max - x_min + 1; }
  int height() const { return y_max - y_min + 1; }
  long long area() const {
    return static_cast<long long>(width()) * static_cast<long long>(height());
  }
  bool valid() const { return x_min <= x_max && y_min <= y_max; }
  bool within(Size s) const {
    return valid() && x_min >= 0 && y_min >= 0 && x_max < s.width &&
           y_max < s.height;
  }
  friend bool operator==(const BBox&, const BBox&) = default;
};

struct InstanceMask {
  int component_id = 0;
  BinaryMask mask;
  std::size_t pixel_count = 0;
};

// bit = 1 exactly where value >= threshold.
BinaryMask binarize(const ProbMap& map, double threshold);

// |a & b| / |a | b|; 1.0 when both masks are empty.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

struct OverlapCounts {
  std::size_t intersection = 0;
  std::size_t uni = 0;
};
OverlapCounts mask_overlap(const BinaryMask& a, const BinaryMask& b);

}  // namespace maskunify

#endif  // MASKUNIFY_RASTER_HPP_
