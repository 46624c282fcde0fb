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

#ifndef MASKUNIFY_MANIFEST_HPP_
#define MASKUNIFY_MANIFEST_HPP_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "maskunify/raster.hpp"
#include "maskunify/task_convert.hpp"

namespace maskunify {

using Json = nlohmann::json;

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// {"width": W, "height": H, "rle": [r0, r1, ...]}
Json mask_to_json(const BinaryMask& mask);
BinaryMask mask_from_json(const Json& j);

// [x_min, y_min, x_max, y_max]
Json bbox_to_json(const BBox& box);
BBox bbox_from_json(const Json& j);

Json detection_to_json(const Detection& d);
// "score" is optional (ground-truth boxes carry none); missing means 1.0.
Detection detection_from_json(const Json& j);

struct ManifestLine {
  std::size_t line_number = 0;  // 1-based
  std::optional<Json> record;
  std::string error;
};

// One entry per non-blank line; unparsable lines carry an error instead of a
// record. Throws std::runtime_error only when the file cannot be opened.
std::vector<ManifestLine> read_jsonl(const std::filesystem::path& path);

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& records);

}  // namespace maskunify

#endif  // MASKUNIFY_MANIFEST_HPP_
