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
#include <array>
#include <sstream>
#include <vector>

#include "maskunify/task_convert.hpp"

namespace maskunify {

namespace {

constexpr std::array<const char*, 9> kCells = {
    "top left",    "top center",    "top right",
    "middle left", "center",        "middle right",
    "bottom left", "bottom center", "bottom right"};

int grid_index(double centre, int extent) {
  return std::clamp(static_cast<int>(3.0 * centre / extent), 0, 2);
}

int cell_of(const BBox& box, Size image) {
  const double cx = (box.x_min + box.x_max + 1) / 2.0;
  const double cy = (box.y_min + box.y_max + 1) / 2.0;
  return grid_index(cy, image.height) * 3 + grid_index(cx, image.width);
}

std::string join_positions(const std::vector<int>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out += (i + 1 == cells.size()) ? " and " : ", ";
    out += kCells[cells[i]];
  }
  return out;
}

}  // namespace

std::string grid_position(const BBox& box, Size image) {
  return kCells[cell_of(box, image)];
}

std::string generate_caption(const std::set<std::string>& labels,
                             const std::map<std::string, std::size_t>& counts,
                             std::span<const Detection> boxes, Size image) {
  if (labels.empty()) return "No salient objects detected.";

  struct Entry {
    std::string category;
    std::size_t count;
    std::vector<int> cells;
  };
  std::vector<Entry> entries;
  for (const auto& c : labels) {
    Entry e{c, 0, {}};
    std::array<bool, 9> seen{};
    for (const auto& d : boxes) {
      if (d.category == c) seen[cell_of(d.bbox, image)] = true;
    }
    for (int i = 0; i < 9; ++i) {
      if (seen[i]) e.cells.push_back(i);
    }
    const auto it = counts.find(c);
    e.count = it != counts.end() ? it->second : count_objects(boxes, c);
    entries.push_back(std::move(e));
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.count > b.count; });

  std::ostringstream out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (i > 0) out << ' ';
    if (e.count == 0) {
      out << "The image contains " << e.category;
    } else if (e.count == 1) {
      out << "There is 1 instance of " << e.category;
    } else {
      out << "There are " << e.count << " instances of " << e.category;
    }
    if (e.count > 0 && !e.cells.empty()) out << " at the " << join_positions(e.cells);
    out << '.';
  }
  return out.str();
}

}  // namespace maskunify
