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

#include "maskunify/scorer.hpp"

#include <cctype>
#include <thread>

#include "httplib.h"
#include "maskunify/pnm.hpp"

namespace maskunify {

namespace {

std::string normalise_words(std::string_view s) {
  std::string out = " ";
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    out.push_back(std::isalnum(u) ? static_cast<char>(std::tolower(u)) : ' ');
  }
  out.push_back(' ');
  return out;
}

std::string box_field(const BBox& b) {
  return std::to_string(b.x_min) + "," + std::to_string(b.y_min) + "," +
         std::to_string(b.x_max) + "," + std::to_string(b.y_max);
}

}  // namespace

double KeywordScorer::score(const ScoreRequest& request) {
  const auto text = normalise_words(request.triplet.expression);
  for (const auto& category : request.triplet.categories) {
    auto word = normalise_words(category);
    // Trim the padding so the token can be re-padded for whole-word search.
    const auto first = word.find_first_not_of(' ');
    if (first == std::string::npos) continue;
    word = word.substr(first, word.find_last_not_of(' ') - first + 1);
    for (const char* suffix : {"", "s", "es"}) {
      if (text.find(" " + word + suffix + " ") != std::string::npos) return 1.0;
    }
  }
  return 0.0;
}

HttpScorer::HttpScorer(HttpScorerOptions options) : options_(std::move(options)) {
  std::string_view rest = options_.url;
  constexpr std::string_view kScheme = "http://";
  if (rest.substr(0, kScheme.size()) != kScheme) {
    throw std::invalid_argument("scorer URL must start with http://, got '" +
                                options_.url + "'");
  }
  rest.remove_prefix(kScheme.size());
  const auto slash = rest.find('/');
  std::string_view authority = rest.substr(0, slash);
  base_path_ = slash == std::string_view::npos ? "" : std::string(rest.substr(slash));
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    host_ = std::string(authority.substr(0, colon));
    try {
      port_ = std::stoi(std::string(authority.substr(colon + 1)));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad port in scorer URL '" + options_.url + "'");
    }
  } else {
    host_ = std::string(authority);
  }
  if (host_.empty()) throw std::invalid_argument("scorer URL has no host");
  if (options_.retries < 0) throw std::invalid_argument("retries must be >= 0");
}

bool HttpScorer::reachable() const {
  httplib::Client client(host_, port_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  return static_cast<bool>(client.Get(base_path_.empty() ? "/" : base_path_));
}

double HttpScorer::score(const ScoreRequest& request) {
  const auto& t = request.triplet;
  httplib::MultipartFormDataItems items = {
      {"expression", t.expression, "", "text/plain"},
      {"box", box_field(request.region), "", "text/plain"},
      {"image_ref", t.image_ref, "", "text/plain"},
  };
  std::filesystem::path path = t.image_ref;
  if (path.is_relative() && !options_.image_root.empty()) path = options_.image_root / path;
  std::error_code ec;
  if (std::filesystem::is_regular_file(path, ec)) {
    auto bytes = read_file_bytes(path);
    std::string content_type = "application/octet-stream";
    try {
      const auto img = decode_pnm(bytes);
      if (request.region.within(img.size)) {
        bytes = encode_pnm(crop_pnm(img, request.region));
        content_type = "image/x-portable-anymap";
      }
    } catch (const PnmError&) {
      // Not netpbm: the service crops using the box field.
    }
    items.push_back({"image", std::move(bytes), path.filename().string(), content_type});
  }

  httplib::Client client(host_, port_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(options_.timeout);
  std::string last_error;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
    auto res = client.Post(base_path_ + "/score", items);
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "server error " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ScorerError("scorer answered HTTP " + std::to_string(res->status));
    }
    Json body;
    try {
      body = Json::parse(res->body);
    } catch (const Json::parse_error&) {
      throw ScorerError("scorer response is not JSON");
    }
    if (!body.is_object() || !body.contains("score") || !body["score"].is_number()) {
      throw ScorerError("scorer response lacks a numeric 'score'");
    }
    return body["score"].get<double>();
  }
  throw ScorerError(last_error);
}

}  // namespace maskunify
