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

#include "maskunify/refine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <tuple>

namespace maskunify {

namespace {

struct Offset {
  int dx;
  int dy;
  double cost;
};

constexpr double kDiagonal = 1.4142135623730951;

std::vector<Offset> neighbourhood(Connectivity connectivity) {
  std::vector<Offset> out = {{-1, 0, 1.0}, {1, 0, 1.0}, {0, -1, 1.0}, {0, 1, 1.0}};
  if (connectivity == Connectivity::kEight) {
    out.insert(out.end(), {{-1, -1, kDiagonal},
                           {1, -1, kDiagonal},
                           {-1, 1, kDiagonal},
                           {1, 1, kDiagonal}});
  }
  return out;
}

}  // namespace

std::vector<Marker> find_markers(const ProbMap& map, double min_value, int radius,
                                 Connectivity connectivity) {
  const int w = map.width();
  const int h = map.height();
  const auto values = map.values();
  const auto nbrs = neighbourhood(connectivity);

  std::vector<std::uint8_t> visited(values.size(), 0);
  std::vector<std::size_t> plateau;
  std::vector<std::size_t> stack;
  std::vector<Marker> candidates;

  for (std::size_t start = 0; start < values.size(); ++start) {
    if (visited[start] || values[start] < min_value) continue;
    const double v = values[start];
    plateau.clear();
    stack.assign(1, start);
    visited[start] = 1;
    bool is_max = true;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      plateau.push_back(i);
      const int x = static_cast<int>(i % w);
      const int y = static_cast<int>(i / w);
      for (const auto& o : nbrs) {
        const int nx = x + o.dx;
        const int ny = y + o.dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
        if (values[j] > v) {
          is_max = false;
        } else if (values[j] == v && !visited[j]) {
          visited[j] = 1;
          stack.push_back(j);
        }
      }
    }
    if (!is_max) continue;

    double cx = 0.0;
    double cy = 0.0;
    for (auto i : plateau) {
      cx += static_cast<double>(i % w);
      cy += static_cast<double>(i / w);
    }
    cx /= static_cast<double>(plateau.size());
    cy /= static_cast<double>(plateau.size());
    std::sort(plateau.begin(), plateau.end());
    std::size_t best = plateau.front();
    double best_d = std::numeric_limits<double>::infinity();
    for (auto i : plateau) {
      const double dx = static_cast<double>(i % w) - cx;
      const double dy = static_cast<double>(i / w) - cy;
      const double d = dx * dx + dy * dy;
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    candidates.push_back(Marker{static_cast<int>(best % w),
                                static_cast<int>(best / w), v});
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const Marker& a, const Marker& b) {
              return std::tie(b.value, a.y, a.x) < std::tie(a.value, b.y, b.x);
            });
  std::vector<Marker> kept;
  const long long r2 = static_cast<long long>(radius) * radius;
  for (const auto& m : candidates) {
    bool suppressed = false;
    for (const auto& k : kept) {
      const long long dx = m.x - k.x;
      const long long dy = m.y - k.y;
      if (dx * dx + dy * dy <= r2) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(m);
  }
  return kept;
}

LabelImage split_by_markers(const LabelImage& components,
                            const std::vector<Marker>& markers,
                            Connectivity connectivity) {
  const int w = components.size.width;
  const int h = components.size.height;
  const auto& lab = components.labels;

  // Markers grouped by the component they fall in.
  std::vector<int> markers_in(components.count() + 1, 0);
  for (const auto& m : markers) {
    const auto l = lab[static_cast<std::size_t>(m.y) * w + m.x];
    if (l > 0) ++markers_in[l];
  }

  // Piece key per pixel: -(component) for untouched components, marker index
  // + 1 for pixels claimed by a marker.
  std::vector<std::int64_t> key(lab.size(), 0);
  for (std::size_t i = 0; i < lab.size(); ++i) {
    if (lab[i] > 0 && markers_in[lab[i]] < 2) key[i] = -static_cast<std::int64_t>(lab[i]);
  }

  using Entry = std::tuple<double, std::size_t, std::size_t>;  // dist, marker, pixel
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  std::vector<double> dist(lab.size(), std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < markers.size(); ++k) {
    const std::size_t i = static_cast<std::size_t>(markers[k].y) * w + markers[k].x;
    if (lab[i] > 0 && markers_in[lab[i]] >= 2) {
      dist[i] = 0.0;
      queue.emplace(0.0, k, i);
    }
  }
  const auto nbrs = neighbourhood(connectivity);
  while (!queue.empty()) {
    const auto [d, k, i] = queue.top();
    queue.pop();
    if (key[i] != 0) continue;
    key[i] = static_cast<std::int64_t>(k) + 1;
    const int x = static_cast<int>(i % w);
    const int y = static_cast<int>(i / w);
    for (const auto& o : nbrs) {
      const int nx = x + o.dx;
      const int ny = y + o.dy;
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
      if (lab[j] != lab[i] || key[j] != 0) continue;
      const double nd = d + o.cost;
      if (nd <= dist[j]) {
        dist[j] = nd;
        queue.emplace(nd, k, j);
      }
    }
  }

  LabelImage out;
  out.size = components.size;
  out.labels.assign(lab.size(), 0);
  std::map<std::int64_t, std::int32_t> ids;
  std::int64_t last_key = 0;
  std::int32_t last_id = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (key[i] == 0) continue;
      if (key[i] != last_key) {
        auto [it, inserted] =
            ids.emplace(key[i], static_cast<std::int32_t>(ids.size() + 1));
        if (inserted) out.stats.push_back(ComponentStats{BBox{x, y, x, y}, 0, x, y});
        last_key = key[i];
        last_id = it->second;
      }
      const std::int32_t l = last_id;
      out.labels[i] = l;
      auto& s = out.stats[l - 1];
      s.box.x_min = std::min(s.box.x_min, x);
      s.box.x_max = std::max(s.box.x_max, x);
      s.box.y_min = std::min(s.box.y_min, y);
      s.box.y_max = std::max(s.box.y_max, y);
      ++s.pixel_count;
    }
  }
  return out;
}

}  // namespace maskunify
