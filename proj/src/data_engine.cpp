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

#include "maskunify/data_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <variant>

#include "maskunify/parallel.hpp"
#include "maskunify/pnm.hpp"
#include "maskunify/scorer.hpp"
#include "maskunify/task_convert.hpp"

namespace maskunify {

namespace {

constexpr std::pair<TripletStrategy, std::string_view> kStrategyNames[] = {
    {TripletStrategy::kOneToOne, "one-to-one"},
    {TripletStrategy::kOneToMany, "one-to-many"},
    {TripletStrategy::kOneToZero, "one-to-zero"},
    {TripletStrategy::kVlmAttribute, "vlm-attribute"},
};

std::set<std::string> string_set(const Json& j, const char* key) {
  std::set<std::string> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) throw ManifestError(std::string("'") + key + "' must be an array");
  for (const auto& v : j[key]) {
    if (!v.is_string()) throw ManifestError(std::string("'") + key + "' entries must be strings");
    out.insert(v.get<std::string>());
  }
  return out;
}

// Uniform integer in [0, n) from the raw engine output, so that a seed
// reproduces the same draw on every standard library.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace

std::string_view to_string(TripletStrategy s) {
  for (const auto& [k, name] : kStrategyNames) {
    if (k == s) return name;
  }
  return "unknown";
}

TripletStrategy parse_triplet_strategy(std::string_view s) {
  for (const auto& [k, name] : kStrategyNames) {
    if (name == s) return k;
  }
  throw ManifestError("unknown triplet strategy '" + std::string(s) + "'");
}

std::string category_expression(std::string_view category) {
  return std::string(category) + " in the image.";
}

Json triplet_to_json(const Triplet& t) {
  return Json{{"image", t.image_ref},
              {"expression", t.expression},
              {"mask", mask_to_json(t.mask)},
              {"strategy", to_string(t.source_strategy)},
              {"categories", t.categories},
              {"attributes", t.attributes}};
}

Triplet triplet_from_json(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ManifestError("triplet must be a JSON object");
  Triplet t;
  if (!j.contains("image") || !j["image"].is_string() ||
      j["image"].get<std::string>().empty()) {
    throw ManifestError("triplet needs a non-empty string 'image'");
  }
  t.image_ref = j["image"].get<std::string>();
  if (!j.contains("expression") || !j["expression"].is_string()) {
    throw ManifestError("triplet needs a string 'expression'");
  }
  t.expression = j["expression"].get<std::string>();
  if (j.contains("mask")) {
    t.mask = mask_from_json(j["mask"]);
  } else if (j.contains("mask_file") && j["mask_file"].is_string()) {
    std::filesystem::path p = j["mask_file"].get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    try {
      t.mask = load_mask_image(p);
    } catch (const std::exception& e) {
      throw ManifestError(e.what());
    }
  } else {
    throw ManifestError("triplet needs 'mask' (RLE) or 'mask_file'");
  }
  if (j.contains("strategy")) {
    if (!j["strategy"].is_string()) throw ManifestError("'strategy' must be a string");
    t.source_strategy = parse_triplet_strategy(j["strategy"].get<std::string>());
  }
  t.categories = string_set(j, "categories");
  t.attributes = string_set(j, "attributes");
  return t;
}

std::vector<Triplet> make_one_to_many(std::string_view image_ref,
                                      std::span<const CategoryMask> instances) {
  std::map<std::string, BinaryMask> unions;
  for (const auto& inst : instances) {
    if (inst.mask.size() != instances.front().mask.size()) {
      throw DimensionMismatch("instance masks of one image differ in size");
    }
    auto [it, inserted] = unions.try_emplace(inst.category, inst.mask);
    if (inserted) continue;
    auto dst = it->second.mutable_bits();
    const auto src = inst.mask.bits();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] |= src[i];
  }
  std::vector<Triplet> out;
  out.reserve(unions.size());
  for (auto& [category, mask] : unions) {
    Triplet t;
    t.image_ref = std::string(image_ref);
    t.expression = category_expression(category);
    t.mask = std::move(mask);
    t.source_strategy = TripletStrategy::kOneToMany;
    t.categories = {category};
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Triplet> make_one_to_zero(std::string_view image_ref,
                                      const std::set<std::string>& present,
                                      const Vocab& vocab, std::size_t k,
                                      std::uint64_t seed, Size image_size) {
  if (k == 0) return {};
  std::set<std::string> present_ids;
  for (const auto& c : present) {
    present_ids.insert(c);
    if (auto id = vocab.match(c)) present_ids.insert(*id);
  }
  std::vector<std::string> absent;
  for (const auto& leaf : vocab.leaves()) {
    if (!present_ids.count(leaf)) absent.push_back(leaf);
  }
  if (k > absent.size()) {
    throw InsufficientCategories("requested " + std::to_string(k) +
                                 " absent categories but only " +
                                 std::to_string(absent.size()) + " are available");
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + uniform_below(rng, absent.size() - i);
    std::swap(absent[i], absent[j]);
  }
  std::vector<Triplet> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto* node = vocab.node(absent[i]);
    Triplet t;
    t.image_ref = std::string(image_ref);
    t.expression = category_expression(node->name);
    t.mask = BinaryMask(image_size);
    t.source_strategy = TripletStrategy::kOneToZero;
    t.categories = {absent[i]};
    out.push_back(std::move(t));
  }
  return out;
}

IngestResult ingest_one_to_one(std::span<const IndexedRecord> records,
                               const std::filesystem::path& base_dir) {
  IngestResult out;
  for (const auto& r : records) {
    try {
      out.triplets.push_back(triplet_from_json(r.record, base_dir));
    } catch (const std::exception& e) {
      out.errors.push_back(RecordError{r.index, e.what()});
    }
  }
  return out;
}

BBox crop_mask_region(Size image, const BinaryMask& mask, int padding) {
  if (mask.size() != image) {
    throw DimensionMismatch("mask size differs from the image size");
  }
  if (padding < 0) throw std::invalid_argument("crop padding must be >= 0");
  const auto box = mask_to_bbox(mask);
  if (!box) throw std::invalid_argument("cannot crop the region of an empty mask");
  return BBox{std::max(0, box->x_min - padding), std::max(0, box->y_min - padding),
              std::min(image.width - 1, box->x_max + padding),
              std::min(image.height - 1, box->y_max + padding)};
}

void FilterConfig::validate() const {
  if (!(similarity_threshold >= 0.0 && similarity_threshold <= 1.0)) {
    throw std::invalid_argument("similarity_threshold must lie in [0,1]");
  }
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  if (crop_padding < 0) throw std::invalid_argument("crop_padding must be >= 0");
  if (parallelism < 1) throw std::invalid_argument("parallelism must be >= 1");
}

FilterResult filter_pseudo_labels(std::vector<Triplet> candidates,
                                  SimilarityScorer& scorer,
                                  const FilterConfig& config) {
  config.validate();
  FilterResult out;
  std::vector<std::size_t> remaining(candidates.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;

  using Outcome = std::variant<double, std::string>;
  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    out.iterations = iter;
    std::vector<Outcome> outcomes(remaining.size());
    parallel_for(remaining.size(), config.parallelism, [&](std::size_t n) {
      const auto& t = candidates[remaining[n]];
      try {
        const auto region = crop_mask_region(t.mask.size(), t.mask, config.crop_padding);
        const double s = scorer.score(ScoreRequest{t, region});
        if (!(s >= 0.0 && s <= 1.0)) {
          outcomes[n] = std::string("scorer returned out-of-range score");
        } else {
          outcomes[n] = s;
        }
      } catch (const std::exception& e) {
        outcomes[n] = std::string(e.what());
      }
    });

    std::vector<std::size_t> kept;
    for (std::size_t n = 0; n < remaining.size(); ++n) {
      const auto idx = remaining[n];
      if (const auto* err = std::get_if<std::string>(&outcomes[n])) {
        out.rejected.push_back(
            RejectedTriplet{candidates[idx], std::nullopt, iter, "scorer error: " + *err});
      } else if (const double s = std::get<double>(outcomes[n]);
                 s < config.similarity_threshold) {
        std::ostringstream note;
        note << "similarity below threshold " << config.similarity_threshold;
        out.rejected.push_back(RejectedTriplet{candidates[idx], s, iter, note.str()});
      } else {
        kept.push_back(idx);
      }
    }
    const bool dropped = kept.size() != remaining.size();
    remaining = std::move(kept);
    if (!dropped) break;
  }
  for (auto idx : remaining) out.accepted.push_back(std::move(candidates[idx]));
  return out;
}

Json CoverageReport::to_json() const {
  return Json{{"# Samples", samples},
              {"# Cls", categories},
              {"# Attr", attributes},
              {"# Attr/Sample", attributes_per_sample},
              {"total_attribute_tags", total_attribute_tags},
              {"categories_per_level", categories_per_level},
              {"out_of_vocab", out_of_vocab},
              {"out_of_vocab_count", out_of_vocab.size()},
              {"attributes_outside_vocab", attributes_outside_vocab},
              {"samples_per_strategy", samples_per_strategy}};
}

std::string CoverageReport::to_table() const {
  std::ostringstream out;
  char ratio[32];
  std::snprintf(ratio, sizeof ratio, "%.2f", attributes_per_sample);
  out << "# Samples\t# Cls\t# Attr\t# Attr/Sample\n"
      << samples << '\t' << categories << '\t' << attributes << '\t' << ratio << '\n';
  out << "out-of-vocab categories: " << out_of_vocab.size() << '\n';
  return out.str();
}

CoverageReport coverage_stats(std::span<const Triplet> triplets, const Vocab& vocab) {
  CoverageReport r;
  std::set<std::string> matched;
  std::set<std::string> unmatched;
  std::set<std::string> tags;
  const std::set<std::string> known_tags(vocab.attribute_tags().begin(),
                                         vocab.attribute_tags().end());
  for (const auto& t : triplets) {
    ++r.samples;
    ++r.samples_per_strategy[std::string(to_string(t.source_strategy))];
    for (const auto& c : t.categories) {
      if (auto id = vocab.match(c)) {
        matched.insert(*id);
      } else {
        unmatched.insert(c);
      }
    }
    r.total_attribute_tags += t.attributes.size();
    tags.insert(t.attributes.begin(), t.attributes.end());
  }
  r.categories = matched.size();
  for (const auto& id : matched) ++r.categories_per_level[vocab.node(id)->level - 1];
  r.attributes = tags.size();
  for (const auto& tag : tags) {
    if (!known_tags.count(tag)) r.attributes_outside_vocab.push_back(tag);
  }
  r.out_of_vocab.assign(unmatched.begin(), unmatched.end());
  r.attributes_per_sample =
      r.samples == 0 ? 0.0
                     : static_cast<double>(r.total_attribute_tags) /
                           static_cast<double>(r.samples);
  return r;
}

}  // namespace maskunify
