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

#ifndef MASKUNIFY_DATA_ENGINE_HPP_
#define MASKUNIFY_DATA_ENGINE_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "maskunify/manifest.hpp"
#include "maskunify/raster.hpp"
#include "maskunify/vocab.hpp"

namespace maskunify {

class SimilarityScorer;

enum class TripletStrategy { kOneToOne, kOneToMany, kOneToZero, kVlmAttribute };

std::string_view to_string(TripletStrategy s);
TripletStrategy parse_triplet_strategy(std::string_view s);

// (image, expression, mask) record. One-to-zero triplets carry an all-zero
// mask naming a category absent from the image.
struct Triplet {
  std::string image_ref;
  std::string expression;
  BinaryMask mask;
  TripletStrategy source_strategy = TripletStrategy::kOneToOne;
  std::set<std::string> categories;
  std::set<std::string> attributes;
};

// {"image", "expression", "mask": {RLE}, "strategy", "categories", "attributes"}
Json triplet_to_json(const Triplet& t);

// Accepts "mask" as RLE or "mask_file" as a PGM path (resolved against
// base_dir when relative). Missing "strategy" defaults to one-to-one.
Triplet triplet_from_json(const Json& j, const std::filesystem::path& base_dir = {});

// "{category} in the image."
std::string category_expression(std::string_view category);

struct CategoryMask {
  std::string category;
  BinaryMask mask;
};

// One triplet per distinct category, mask = union of that category's
// instances. Output follows lexicographic category order.
std::vector<Triplet> make_one_to_many(std::string_view image_ref,
                                      std::span<const CategoryMask> instances);

class InsufficientCategories : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// k null-mask triplets for distinct vocab leaves absent from `present`,
// sampled uniformly without replacement. Same seed, same output.
std::vector<Triplet> make_one_to_zero(std::string_view image_ref,
                                      const std::set<std::string>& present,
                                      const Vocab& vocab, std::size_t k,
                                      std::uint64_t seed, Size image_size);

struct RecordError {
  std::size_t index = 0;  // position in the input (line number for manifests)
  std::string message;
};

struct IngestResult {
  std::vector<Triplet> triplets;
  std::vector<RecordError> errors;
};

struct IndexedRecord {
  std::size_t index = 0;
  Json record;
};

// Parses ready-made triplet records; a bad record is reported and skipped.
IngestResult ingest_one_to_one(std::span<const IndexedRecord> records,
                               const std::filesystem::path& base_dir = {});

// Tight box of the mask grown by `padding` on every side, clamped to the
// image. Throws std::invalid_argument for an empty mask.
BBox crop_mask_region(Size image, const BinaryMask& mask, int padding);

struct FilterConfig {
  double similarity_threshold = 0.5;
  int max_iterations = 3;
  int crop_padding = 8;
  std::size_t parallelism = 1;

  void validate() const;
};

struct RejectedTriplet {
  Triplet triplet;
  std::optional<double> score;
  int iteration = 0;
  std::string note;
};

struct FilterResult {
  std::vector<Triplet> accepted;
  std::vector<RejectedTriplet> rejected;
  int iterations = 0;
};

// Repeatedly scores the surviving candidates and drops those below the
// threshold, stopping after max_iterations or once a pass drops nothing.
// Scorer failures reject the candidate with a note instead of aborting.
FilterResult filter_pseudo_labels(std::vector<Triplet> candidates,
                                  SimilarityScorer& scorer,
                                  const FilterConfig& config);

struct CoverageReport {
  std::size_t samples = 0;
  std::size_t categories = 0;  // distinct vocab nodes matched
  std::size_t attributes = 0;  // distinct attribute tags
  double attributes_per_sample = 0.0;
  std::size_t total_attribute_tags = 0;
  std::array<std::size_t, 3> categories_per_level{};
  std::vector<std::string> out_of_vocab;  // distinct unmatched categories
  std::vector<std::string> attributes_outside_vocab;
  std::map<std::string, std::size_t> samples_per_strategy;

  Json to_json() const;
  std::string to_table() const;
};

CoverageReport coverage_stats(std::span<const Triplet> triplets, const Vocab& vocab);

}  // namespace maskunify

#endif  // MASKUNIFY_DATA_ENGINE_HPP_
