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

#include "maskunify/cli.hpp"

#include <cstdlib>
#include <fstream>

#include "CLI11.hpp"

namespace maskunify::cli {

namespace {

// Flags the user set explicitly; config-file values only fill the rest.
struct Explicit {
  std::set<std::string> names;
  bool has(const std::string& n) const { return names.count(n) > 0; }
};

template <typename T>
void take(const Json& j, const char* key, const Explicit& given, const char* flag, T& dst) {
  if (j.contains(key) && !given.has(flag)) dst = j[key].get<T>();
}

void apply_config_file(const std::filesystem::path& path, const Explicit& given,
                       RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("config file " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  try {
    take(j, "tau_seg", given, "--tau-seg", c.conversion.tau_seg);
    take(j, "tau_cls", given, "--tau-cls", c.conversion.tau_cls);
    take(j, "lambda", given, "--lambda", c.conversion.lambda_multilabel);
    take(j, "lambda_multilabel", given, "--lambda", c.conversion.lambda_multilabel);
    take(j, "lambda_scene", given, "--lambda-scene", c.conversion.lambda_scene);
    take(j, "area_threshold", given, "--area-threshold", c.conversion.area_threshold_masklevel);
    take(j, "refine", given, "--refine", c.conversion.refine);
    take(j, "marker_radius", given, "--marker-radius", c.conversion.marker_radius);
    if (j.contains("strategy") && !given.has("--strategy")) {
      c.conversion.classification_strategy = parse_strategy(j["strategy"].get<std::string>());
    }
    if (j.contains("connectivity") && !given.has("--connectivity")) {
      c.conversion.connectivity =
          j["connectivity"].get<int>() == 4 ? Connectivity::kFour : Connectivity::kEight;
    }
    take(j, "similarity_threshold", given, "--threshold", c.filter.similarity_threshold);
    take(j, "max_iterations", given, "--max-iterations", c.filter.max_iterations);
    take(j, "crop_padding", given, "--padding", c.filter.crop_padding);
    take(j, "workers", given, "--workers", c.workers);
    take(j, "seed", given, "--seed", c.seed);
    take(j, "categories", given, "--categories", c.categories);
    take(j, "zero_per_image", given, "--zero-per-image", c.zero_per_image);
    take(j, "scorer_url", given, "--scorer-url", c.scorer_url);
    take(j, "timeout_ms", given, "--timeout-ms", c.scorer_timeout_ms);
    take(j, "retries", given, "--retries", c.scorer_retries);
  } catch (const Json::exception& e) {
    throw std::invalid_argument("config file " + path.string() + ": " + e.what());
  }
}

std::vector<std::string> split_commas(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::size_t start = 0;
    while (start <= item.size()) {
      const auto end = item.find(',', start);
      auto tok = item.substr(start, end == std::string::npos ? std::string::npos : end - start);
      if (!tok.empty()) out.push_back(tok);
      if (end == std::string::npos) break;
      start = end + 1;
    }
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Referring-segmentation task conversion, curation and evaluation"};
  app.require_subcommand(1);
  RunConfig c;
  std::string strategy = "prob-level";
  std::string pr_rule = "strict";
  std::string multilabel_mode = "per-class";
  std::string counting_mode = "exact";
  int connectivity = 8;
  std::vector<std::string> categories;

  auto* convert = app.add_subcommand("convert", "probability maps -> task outputs");
  auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
  auto* curate = app.add_subcommand("curate", "build and filter a triplet dataset");
  auto* stats = app.add_subcommand("stats", "semantic-coverage statistics");

  std::vector<std::pair<CLI::Option*, std::string>> tracked;
  auto track = [&](CLI::Option* o) {
    tracked.emplace_back(o, o->get_name());
    return o;
  };

  for (auto* sub : {convert, eval, curate, stats}) {
    sub->add_option("--input,-i", c.inputs, "input path(s)")->required();
    sub->add_option("--output,-o", c.output, "output directory")->required();
    sub->add_option("--config", c.config_file, "JSON config file")->check(CLI::ExistingFile);
    track(sub->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber));
    track(sub->add_option("--seed", c.seed, "random seed"));
  }

  track(convert->add_option("--categories", categories, "category list (comma separated)"));
  track(convert->add_option("--tau-seg", c.conversion.tau_seg, "segmentation threshold"));
  track(convert->add_option("--tau-cls", c.conversion.tau_cls, "classification threshold"));
  track(convert->add_option("--lambda", c.conversion.lambda_multilabel,
                            "mean/max pooling balance for multi-label"));
  track(convert->add_option("--lambda-scene", c.conversion.lambda_scene,
                            "mean/max pooling balance for scene classification"));
  track(convert->add_option("--strategy", strategy, "prob-level | mask-level"));
  track(convert->add_option("--area-threshold", c.conversion.area_threshold_masklevel,
                            "mask-level area threshold (pixels)"));
  track(convert->add_flag("--refine,!--no-refine", c.conversion.refine,
                          "marker-based split of merged objects"));
  track(convert->add_option("--marker-radius", c.conversion.marker_radius,
                            "marker suppression radius (pixels)"));
  track(convert->add_option("--connectivity", connectivity, "4 or 8")
            ->check(CLI::IsMember({4, 8})));

  eval->add_option("--gt", c.ground_truth, "ground-truth manifest")->required();
  eval->add_option("--pr-rule", pr_rule, "strict (IoU > tau) | inclusive (IoU >= tau)")
      ->check(CLI::IsMember({"strict", "inclusive"}));
  eval->add_option("--multilabel-acc", multilabel_mode, "per-class | exact-match")
      ->check(CLI::IsMember({"per-class", "exact-match"}));
  eval->add_option("--count-acc", counting_mode, "exact | tolerance")
      ->check(CLI::IsMember({"exact", "tolerance"}));

  for (auto* sub : {curate, stats}) {
    sub->add_option("--vocab", c.vocab, "vocabulary JSON")->required();
  }
  track(curate->add_option("--zero-per-image", c.zero_per_image,
                           "one-to-zero triplets per image"));
  auto* stub = curate->add_flag("--scorer-stub", c.scorer_stub, "offline keyword scorer");
  track(curate->add_option("--scorer-url", c.scorer_url, "similarity service base URL"))
      ->excludes(stub);
  track(curate->add_option("--threshold", c.filter.similarity_threshold,
                           "similarity threshold"));
  track(curate->add_option("--max-iterations", c.filter.max_iterations,
                           "filter iterations"));
  track(curate->add_option("--padding", c.filter.crop_padding, "crop padding (pixels)"));
  track(curate->add_option("--timeout-ms", c.scorer_timeout_ms, "scorer timeout"));
  track(curate->add_option("--retries", c.scorer_retries, "scorer retries"));
  curate->add_option("--image-root", c.image_root, "directory for relative image refs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  auto* chosen = app.get_subcommands().front();
  c.subcommand = chosen->get_name();

  Explicit given;
  for (const auto& [opt, name] : tracked) {
    if (opt->count() > 0) given.names.insert(name);
  }
  try {
    c.conversion.classification_strategy = parse_strategy(strategy);
    c.conversion.connectivity = connectivity == 4 ? Connectivity::kFour : Connectivity::kEight;
    c.categories = split_commas(categories);
    if (!c.config_file.empty()) apply_config_file(c.config_file, given, c);
    if (given.has("--strategy")) {
      c.conversion.classification_strategy = parse_strategy(strategy);
    }
    c.pr_rule = pr_rule == "inclusive" ? ThresholdRule::kInclusive : ThresholdRule::kStrict;
    c.multilabel_mode = multilabel_mode == "exact-match" ? MultilabelAccuracy::kExactMatch
                                                         : MultilabelAccuracy::kPerClass;
    c.counting_mode = counting_mode == "tolerance" ? CountingAccuracy::kRelativeTolerance
                                                   : CountingAccuracy::kExact;
    c.conversion.validate();
    c.filter.parallelism = c.workers;
    c.filter.validate();
    if (c.workers < 1) throw std::invalid_argument("--workers must be >= 1");
    if (c.scorer_url.empty() && !c.scorer_stub) {
      if (const char* env = std::getenv("REMOTE_SAM_SCORER_URL")) c.scorer_url = env;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  for (const auto& in : c.inputs) {
    std::error_code ec;
    if (!std::filesystem::exists(in, ec)) {
      err << "error: input " << in.string() << " does not exist\n";
      return kUsageError;
    }
  }

  try {
    if (c.subcommand == "convert") return cmd_convert(c, err);
    if (c.subcommand == "eval") return cmd_eval(c, err);
    if (c.subcommand == "curate") return cmd_curate(c, err);
    return cmd_stats(c, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

}  // namespace maskunify::cli
