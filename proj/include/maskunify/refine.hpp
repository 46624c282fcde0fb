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

#ifndef MASKUNIFY_REFINE_HPP_
#define MASKUNIFY_REFINE_HPP_

#include <vector>

#include "maskunify/components.hpp"
#include "maskunify/raster.hpp"

namespace maskunify {

struct Marker {
  int x = 0;
  int y = 0;
  double value = 0.0;
};

// Regional maxima of `map` among pixels with value >= min_value. A plateau of
// equal values counts once, represented by its pixel nearest the plateau
// centroid. Survivors of greedy suppression (highest value first, then raster
// order) are at Euclidean distance > radius from each other.
std::vector<Marker> find_markers(const ProbMap& map, double min_value, int radius,
                                 Connectivity connectivity = Connectivity::kEight);

// Splits every component holding two or more markers into geodesic
// nearest-marker cells (path length 1 per axial step, sqrt(2) per diagonal,
// confined to the component). Components with at most one marker are kept.
// The result is relabeled in first-pixel raster order.
LabelImage split_by_markers(const LabelImage& components,
                            const std::vector<Marker>& markers,
                            Connectivity connectivity = Connectivity::kEight);

}  // namespace maskunify

#endif  // MASKUNIFY_REFINE_HPP_
