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

#ifndef MASKUNIFY_VOCAB_HPP_
#define MASKUNIFY_VOCAB_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maskunify/manifest.hpp"

namespace maskunify {

struct VocabNode {
  std::string id;
  std::string name;
  std::string parent;  // empty for top-level nodes
  int level = 1;       // 1..3
};

// Three-level category tree plus the attribute-tag list.
//
// JSON layout:
//   {"attributes": ["color", ...],
//    "categories": [{"id": "...", "name": "...", "children": [...]}, ...]}
// Every root-to-leaf path has exactly three nodes. Ids are unique.
class Vocab {
 public:
  Vocab() = default;

  static Vocab from_json(const Json& j);
  static Vocab load(const std::filesystem::path& path);
  Json to_json() const;

  // Leaf ids in lexicographic order.
  const std::vector<std::string>& leaves() const { return leaves_; }
  const std::vector<std::string>& attribute_tags() const { return attributes_; }
  const VocabNode* node(std::string_view id) const;

  // Case-insensitive match against node ids and display names.
  std::optional<std::string> match(std::string_view category) const;

  std::size_t size() const { return nodes_.size(); }

 private:
  void add_subtree(const Json& j, const std::string& parent, int level);

  std::map<std::string, VocabNode, std::less<>> nodes_;
  std::map<std::string, std::string, std::less<>> lookup_;  // folded key -> id
  std::vector<std::string> leaves_;
  std::vector<std::string> attributes_;
  std::vector<Json> roots_;
};

}  // namespace maskunify

#endif  // MASKUNIFY_VOCAB_HPP_
