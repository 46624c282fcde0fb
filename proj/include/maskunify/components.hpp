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

#ifndef MASKUNIFY_COMPONENTS_HPP_
#define MASKUNIFY_COMPONENTS_HPP_

#include <cstdint>
#include <vector>

#include "maskunify/raster.hpp"

namespace maskunify {

enum class Connectivity { kFour = 4, kEight = 8 };

struct ComponentStats {
  BBox box;
  std::size_t pixel_count = 0;
  // First pixel of the component in raster order.
  int first_x = 0;
  int first_y = 0;
};

// Dense labeling: labels[i] == 0 is background, components are numbered
// 1..stats.size() in raster order of their first pixel.
struct LabelImage {
  Size size;
  std::vector<std::int32_t> labels;
  std::vector<ComponentStats> stats;

  std::size_t count() const { return stats.size(); }
  BinaryMask component_mask(int label) const;
};

LabelImage label_components(const BinaryMask& mask,
                            Connectivity connectivity = Connectivity::kEight);

// Maximal connected foreground sets, ordered by their first pixel in raster
// order (minimum row, then minimum column within that row).
std::vector<InstanceMask> connected_components(
    const BinaryMask& mask, Connectivity connectivity = Connectivity::kEight);

}  // namespace maskunify

#endif  // MASKUNIFY_COMPONENTS_HPP_
