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

#ifndef MASKUNIFY_RLE_HPP_
#define MASKUNIFY_RLE_HPP_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "maskunify/raster.hpp"

namespace maskunify {

// Row-major run lengths, alternating 0-run / 1-run, always starting with a
// (possibly empty) 0-run.
using RleCounts = std::vector<std::uint32_t>;

class RleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

RleCounts rle_encode(const BinaryMask& mask);

// Throws RleError when the runs do not cover exactly width * height pixels.
BinaryMask rle_decode(std::span<const std::uint32_t> runs, Size size);

}  // namespace maskunify

#endif  // MASKUNIFY_RLE_HPP_
