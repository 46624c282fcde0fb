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

#include "maskunify/manifest.hpp"

#include <fstream>

#include "maskunify/rle.hpp"

namespace maskunify {

namespace {

int get_dim(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw ManifestError(std::string("mask is missing integer '") + key + "'");
  }
  const auto v = j[key].get<long long>();
  if (v <= 0 || v > (1 << 20)) {
    throw ManifestError(std::string("mask '") + key + "' out of range");
  }
  return static_cast<int>(v);
}

}  // namespace

Json mask_to_json(const BinaryMask& mask) {
  return Json{{"width", mask.width()}, {"height", mask.height()},
              {"rle", rle_encode(mask)}};
}

BinaryMask mask_from_json(const Json& j) {
  if (!j.is_object()) throw ManifestError("mask must be a JSON object");
  const Size size{get_dim(j, "width"), get_dim(j, "height")};
  if (!j.contains("rle") || !j["rle"].is_array()) {
    throw ManifestError("mask is missing 'rle' array");
  }
  RleCounts runs;
  runs.reserve(j["rle"].size());
  for (const auto& r : j["rle"]) {
    if (!r.is_number_unsigned() && !(r.is_number_integer() && r.get<long long>() >= 0)) {
      throw ManifestError("RLE runs must be non-negative integers");
    }
    const auto v = r.get<unsigned long long>();
    if (v > 0xffffffffULL) throw ManifestError("RLE run too long");
    runs.push_back(static_cast<std::uint32_t>(v));
  }
  try {
    return rle_decode(runs, size);
  } catch (const RleError& e) {
    throw ManifestError(e.what());
  }
}

Json bbox_to_json(const BBox& box) {
  return Json::array({box.x_min, box.y_min, box.x_max, box.y_max});
}

BBox bbox_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw ManifestError("bbox must be [x_min, y_min, x_max, y_max]");
  }
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw ManifestError("bbox coordinates must be integers");
  }
  BBox b{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
  if (!b.valid()) throw ManifestError("bbox has min > max");
  return b;
}

Json detection_to_json(const Detection& d) {
  return Json{{"category", d.category}, {"bbox", bbox_to_json(d.bbox)},
              {"score", d.score}};
}

Detection detection_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("category") || !j["category"].is_string()) {
    throw ManifestError("detection needs a string 'category'");
  }
  if (!j.contains("bbox")) throw ManifestError("detection needs a 'bbox'");
  Detection d{bbox_from_json(j["bbox"]), j["category"].get<std::string>(), 1.0};
  if (j.contains("score")) {
    if (!j["score"].is_number()) throw ManifestError("detection score must be numeric");
    d.score = j["score"].get<double>();
    if (!(d.score >= 0.0 && d.score <= 1.0)) {
      throw ManifestError("detection score outside [0,1]");
    }
  }
  return d;
}

std::vector<ManifestLine> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path.string());
  std::vector<ManifestLine> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ManifestLine entry;
    entry.line_number = n;
    try {
      entry.record = Json::parse(line);
      if (!entry.record->is_object()) {
        entry.record.reset();
        entry.error = "record is not a JSON object";
      }
    } catch (const Json::parse_error& e) {
      entry.error = e.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest " + path.string());
  for (const auto& r : records) out << r.dump() << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace maskunify
