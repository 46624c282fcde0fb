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

#include "maskunify/components.hpp"

#include <algorithm>
#include <numeric>

namespace maskunify {

namespace {

// Union-find over provisional labels. Roots are always the smallest label of
// their set so that the final numbering follows first-pixel raster order.
class Equivalences {
 public:
  std::int32_t make() {
    parent_.push_back(static_cast<std::int32_t>(parent_.size()));
    return parent_.back();
  }
  std::int32_t find(std::int32_t x) {
    std::int32_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const std::int32_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::int32_t> parent_{0};
};

}  // namespace

BinaryMask LabelImage::component_mask(int label) const {
  BinaryMask out(size);
  auto bits = out.mutable_bits();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) bits[i] = 1;
  }
  return out;
}

LabelImage label_components(const BinaryMask& mask, Connectivity connectivity) {
  const int w = mask.width();
  const int h = mask.height();
  const auto bits = mask.bits();
  LabelImage out;
  out.size = mask.size();
  out.labels.assign(bits.size(), 0);
  auto& lab = out.labels;
  const bool eight = connectivity == Connectivity::kEight;

  Equivalences eq;
  for (int y = 0; y < h; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      const std::size_t i = row + x;
      if (!bits[i]) continue;
      std::int32_t current = 0;
      auto consider = [&](std::int32_t neighbour) {
        if (neighbour == 0) return;
        if (current == 0) {
          current = neighbour;
        } else if (current != neighbour) {
          eq.unite(current, neighbour);
        }
      };
      if (x > 0) consider(lab[i - 1]);
      if (y > 0) {
        const std::size_t up = i - w;
        consider(lab[up]);
        if (eight) {
          if (x > 0) consider(lab[up - 1]);
          if (x + 1 < w) consider(lab[up + 1]);
        }
      }
      lab[i] = current != 0 ? current : eq.make();
    }
  }

  // Provisional labels are created in raster order and roots are set minima,
  // so numbering roots by increasing provisional label yields first-pixel
  // order.
  std::vector<std::int32_t> final_label(eq.size(), 0);
  std::int32_t next = 0;
  for (std::size_t l = 1; l < eq.size(); ++l) {
    const auto root = eq.find(static_cast<std::int32_t>(l));
    if (root == static_cast<std::int32_t>(l)) final_label[l] = ++next;
  }
  for (std::size_t l = 1; l < eq.size(); ++l) {
    final_label[l] = final_label[eq.find(static_cast<std::int32_t>(l))];
  }

  out.stats.resize(static_cast<std::size_t>(next));
  std::vector<bool> seen(static_cast<std::size_t>(next), false);
  for (int y = 0; y < h; ++y) {
    const std::size_t row = static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      auto& l = lab[row + x];
      if (l == 0) continue;
      l = final_label[l];
      auto& s = out.stats[l - 1];
      if (!seen[l - 1]) {
        seen[l - 1] = true;
        s.box = BBox{x, y, x, y};
        s.first_x = x;
        s.first_y = y;
      } else {
        s.box.x_min = std::min(s.box.x_min, x);
        s.box.x_max = std::max(s.box.x_max, x);
        s.box.y_max = y;
      }
      ++s.pixel_count;
    }
  }
  return out;
}

std::vector<InstanceMask> connected_components(const BinaryMask& mask,
                                               Connectivity connectivity) {
  const auto labeled = label_components(mask, connectivity);
  std::vector<InstanceMask> out;
  out.reserve(labeled.count());
  for (std::size_t c = 0; c < labeled.count(); ++c) {
    out.push_back(InstanceMask{static_cast<int>(c),
                               BinaryMask(mask.size()),
                               labeled.stats[c].pixel_count});
  }
  const auto& lab = labeled.labels;
  for (std::size_t i = 0; i < lab.size(); ++i) {
    if (lab[i] != 0) out[lab[i] - 1].mask.mutable_bits()[i] = 1;
  }
  return out;
}

}  // namespace maskunify
