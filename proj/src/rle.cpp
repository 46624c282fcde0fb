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

#include "maskunify/rle.hpp"

#include <algorithm>
#include <string>

namespace maskunify {

RleCounts rle_encode(const BinaryMask& mask) {
  RleCounts runs;
  std::uint8_t current = 0;
  std::uint32_t length = 0;
  for (std::uint8_t b : mask.bits()) {
    if (b != current) {
      runs.push_back(length);
      current = b;
      length = 0;
    }
    ++length;
  }
  runs.push_back(length);
  return runs;
}

BinaryMask rle_decode(std::span<const std::uint32_t> runs, Size size) {
  if (size.width <= 0 || size.height <= 0) {
    throw RleError("RLE target dimensions must be positive");
  }
  const std::size_t total = size.area();
  std::size_t sum = 0;
  for (auto r : runs) sum += r;
  if (sum != total) {
    throw RleError("RLE runs sum to " + std::to_string(sum) + ", expected " +
                   std::to_string(total));
  }
  std::vector<std::uint8_t> bits(total, 0);
  std::size_t pos = 0;
  std::uint8_t value = 0;
  for (auto r : runs) {
    if (value) std::fill_n(bits.begin() + static_cast<std::ptrdiff_t>(pos), r, 1);
    pos += r;
    value ^= 1;
  }
  return BinaryMask(size, std::move(bits));
}

}  // namespace maskunify
