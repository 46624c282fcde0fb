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

#ifndef MASKUNIFY_SCORER_HPP_
#define MASKUNIFY_SCORER_HPP_

#include <chrono>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "maskunify/data_engine.hpp"

namespace maskunify {

class ScorerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScoreRequest {
  const Triplet& triplet;
  BBox region;
};

// Region/expression similarity in [0, 1]. Implementations must be safe to
// call from several threads at once; failures throw ScorerError.
class SimilarityScorer {
 public:
  virtual ~SimilarityScorer() = default;
  virtual double score(const ScoreRequest& request) = 0;
};

// Offline stand-in: 1.0 when the expression mentions one of the triplet's
// categories as a whole word (case-insensitive, '_' read as a space), else 0.
class KeywordScorer final : public SimilarityScorer {
 public:
  double score(const ScoreRequest& request) override;
};

struct HttpScorerOptions {
  std::string url;  // e.g. http://host:8080
  std::chrono::milliseconds timeout{10000};
  int retries = 2;
  // Image references are resolved against this directory when relative.
  std::filesystem::path image_root;
};

// POST {url}/score, multipart/form-data:
//   image      region crop (PNM) when the source is netpbm, else the whole file
//   box        "x_min,y_min,x_max,y_max" of the region in source pixels
//   expression the referring expression
//   image_ref  the triplet's image reference
// Response: {"score": s} with s in [0, 1].
class HttpScorer final : public SimilarityScorer {
 public:
  explicit HttpScorer(HttpScorerOptions options);
  double score(const ScoreRequest& request) override;

  // True if the endpoint accepts a TCP connection and answers HTTP.
  bool reachable() const;

 private:
  HttpScorerOptions options_;
  std::string host_;
  int port_ = 80;
  std::string base_path_;
};

}  // namespace maskunify

#endif  // MASKUNIFY_SCORER_HPP_
