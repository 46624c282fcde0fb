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

#ifndef MASKUNIFY_PNM_HPP_
#define MASKUNIFY_PNM_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "maskunify/raster.hpp"

namespace maskunify {

class PnmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary (P5/P6) or ASCII (P2/P3) netpbm raster with 8- or 16-bit samples.
struct PnmImage {
  Size size;
  int channels = 1;
  int maxval = 255;
  std::vector<std::uint16_t> samples;  // row-major, interleaved channels
};

PnmImage decode_pnm(std::string_view bytes);
PnmImage read_pnm(const std::filesystem::path& path);

// Always emits binary form (P5 for one channel, P6 for three).
std::string encode_pnm(const PnmImage& image);

PnmImage crop_pnm(const PnmImage& image, const BBox& box);

// Grey PGM → probabilities value / maxval.
ProbMap load_prob_map(const std::filesystem::path& path, std::string label = {});

// Any nonzero sample is foreground.
BinaryMask load_mask_image(const std::filesystem::path& path);

// 8-bit PGM, 0 / 255.
void save_mask_image(const std::filesystem::path& path, const BinaryMask& mask);

// 8-bit PGM of raw byte values (label rasters).
void save_gray8(const std::filesystem::path& path, Size size,
                const std::vector<std::uint8_t>& pixels);

std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::string_view bytes);

}  // namespace maskunify

#endif  // MASKUNIFY_PNM_HPP_
