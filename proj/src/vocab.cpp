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

#include "maskunify/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

namespace maskunify {

namespace {

std::string fold(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

void Vocab::add_subtree(const Json& j, const std::string& parent, int level) {
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
    throw ManifestError("vocab node needs a string 'id'");
  }
  VocabNode node;
  node.id = j["id"].get<std::string>();
  if (node.id.empty()) throw ManifestError("vocab node id must be non-empty");
  node.name = j.value("name", node.id);
  node.parent = parent;
  node.level = level;
  if (nodes_.count(node.id)) throw ManifestError("duplicate vocab id '" + node.id + "'");

  const bool has_children = j.contains("children") && !j["children"].empty();
  if (level < 3 && !has_children) {
    throw ManifestError("vocab leaf '" + node.id + "' sits at level " +
                        std::to_string(level) + ", expected 3");
  }
  if (level == 3 && has_children) {
    throw ManifestError("vocab node '" + node.id + "' nests deeper than three levels");
  }
  nodes_.emplace(node.id, node);
  lookup_.emplace(fold(node.id), node.id);
  lookup_.emplace(fold(node.name), node.id);
  if (level == 3) {
    leaves_.push_back(node.id);
    return;
  }
  if (!j["children"].is_array()) throw ManifestError("vocab 'children' must be an array");
  for (const auto& child : j["children"]) add_subtree(child, node.id, level + 1);
}

Vocab Vocab::from_json(const Json& j) {
  if (!j.is_object() || !j.contains("categories") || !j["categories"].is_array()) {
    throw ManifestError("vocab needs a 'categories' array");
  }
  Vocab v;
  for (const auto& root : j["categories"]) v.add_subtree(root, "", 1);
  v.roots_ = j["categories"].get<std::vector<Json>>();
  if (j.contains("attributes")) {
    if (!j["attributes"].is_array()) throw ManifestError("vocab 'attributes' must be an array");
    for (const auto& a : j["attributes"]) {
      if (!a.is_string()) throw ManifestError("attribute tags must be strings");
      v.attributes_.push_back(a.get<std::string>());
    }
  }
  std::sort(v.leaves_.begin(), v.leaves_.end());
  return v;
}

Vocab Vocab::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocab " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw ManifestError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

Json Vocab::to_json() const {
  return Json{{"attributes", attributes_}, {"categories", roots_}};
}

const VocabNode* Vocab::node(std::string_view id) const {
  const auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

std::optional<std::string> Vocab::match(std::string_view category) const {
  const auto it = lookup_.find(fold(category));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

}  // namespace maskunify
