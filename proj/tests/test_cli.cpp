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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "httplib.h"
#include "maskunify/cli.hpp"
#include "maskunify/manifest.hpp"
#include "maskunify/pnm.hpp"
#include "oracles.hpp"

using namespace maskunify;
namespace fs = std::filesystem;

namespace {

const fs::path kData = MASKUNIFY_TEST_DATA;

fs::path fresh_dir(const std::string& name) {
  auto p = fs::temp_directory_path() / ("maskunify_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "maskunify");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) { return read_file_bytes(p); }

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

std::vector<Json> records(const fs::path& p) {
  std::vector<Json> out;
  for (auto& l : read_jsonl(p)) {
    REQUIRE(l.record.has_value());
    out.push_back(*l.record);
  }
  return out;
}

// Three small scenes with hand-placed disks, stored as 8-bit PGMs.
const std::vector<std::string> kClasses = {"airplane", "ship", "storage_tank"};

void write_fixture(const fs::path& root) {
  const Size size{64, 48};
  const std::vector<std::vector<oracle::Disk>> scenes = {
      {{10, 10, 6, "airplane"}, {40, 12, 7, "airplane"}, {20, 34, 8, "ship"}},
      {{50, 34, 9, "storage_tank"}, {16, 24, 5, "ship"}},
      // Two touching tanks that refinement separates.
      {{20, 24, 8, "storage_tank"}, {34, 24, 8, "storage_tank"}, {56, 8, 4, "airplane"}},
  };
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    const auto dir = root / ("img_" + std::to_string(s));
    fs::create_directories(dir);
    for (const auto& cm : oracle::ideal_maps(scenes[s], kClasses, size)) {
      PnmImage img{size, 1, 255, {}};
      for (double v : cm.map.values()) {
        img.samples.push_back(static_cast<std::uint16_t>(std::lround(v * 255.0)));
      }
      write_file_bytes(dir / (cm.category + ".pgm"), encode_pnm(img));
    }
  }
}

std::vector<std::string> convert_args(const fs::path& in, const fs::path& out) {
  return {"convert", "-i", in.string(), "-o", out.string(), "--categories",
          "airplane,ship,storage_tank"};
}

void check_golden(const fs::path& produced, const std::string& golden_name) {
  const auto golden = kData / golden_name;
  if (std::getenv("MASKUNIFY_UPDATE_GOLDEN")) {
    fs::copy_file(produced, golden, fs::copy_options::overwrite_existing);
  }
  REQUIRE(fs::exists(golden));
  CHECK(slurp(produced) == slurp(golden));
}

Json vocab_json() {
  Json roots = Json::array();
  for (const char* top : {"vehicle", "structure"}) {
    Json mids = Json::array();
    for (int m = 0; m < 2; ++m) {
      Json leaves = Json::array();
      for (int l = 0; l < 3; ++l) {
        const std::string id = std::string(top) + "_" + std::to_string(m) + std::to_string(l);
        leaves.push_back({{"id", id}, {"name", id}});
      }
      const std::string mid = std::string(top) + "_" + std::to_string(m);
      mids.push_back({{"id", mid}, {"name", mid}, {"children", leaves}});
    }
    roots.push_back({{"id", top}, {"name", top}, {"children", mids}});
  }
  auto j = Json{{"attributes", {"color", "size", "position"}}, {"categories", roots}};
  // Leaves that the curate fixtures refer to by name.
  j["categories"][0]["children"][0]["children"][0] = {{"id", "ship"}, {"name", "ship"}};
  j["categories"][0]["children"][0]["children"][1] = {{"id", "airplane"}, {"name", "airplane"}};
  return j;
}

Json square_mask(Size size, BBox b) {
  BinaryMask m(size);
  for (int y = b.y_min; y <= b.y_max; ++y)
    for (int x = b.x_min; x <= b.x_max; ++x) m.set(x, y);
  return mask_to_json(m);
}

// Curate input: 20 attribute candidates (6 mislabeled), 2 instance records
// and one ready-made triplet.
fs::path write_curate_input(const fs::path& dir) {
  const Size size{24, 24};
  std::vector<Json> recs;
  for (int i = 0; i < 20; ++i) {
    const bool bad = i % 10 < 3;
    recs.push_back(Json{{"image", "scene_" + std::to_string(i % 4) + ".png"},
                        {"expression", bad ? "the parking lot " + std::to_string(i)
                                           : "the grey ship " + std::to_string(i)},
                        {"mask", square_mask(size, BBox{2, 2, 9, 9})},
                        {"strategy", "vlm-attribute"},
                        {"categories", {"ship"}},
                        {"attributes", {"color"}}});
  }
  for (int k = 0; k < 2; ++k) {
    recs.push_back(Json{{"image", "inst_" + std::to_string(k) + ".png"},
                        {"instances",
                         {{{"category", "ship"}, {"mask", square_mask(size, BBox{0, 0, 3, 3})}},
                          {{"category", "ship"}, {"mask", square_mask(size, BBox{8, 8, 9, 9})}},
                          {{"category", "airplane"},
                           {"mask", square_mask(size, BBox{15, 1, 20, 4})}}}}});
  }
  recs.push_back(Json{{"image", "plain.png"},
                      {"expression", "the airplane"},
                      {"mask", square_mask(size, BBox{1, 1, 2, 2})},
                      {"categories", {"airplane"}}});
  const auto path = dir / "candidates.jsonl";
  write_jsonl(path, recs);
  std::ofstream(path, std::ios::app) << "{broken\n";
  write_file_bytes(dir / "vocab.json", vocab_json().dump(2));
  return path;
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(invoke({}).code == cli::kUsageError);
  CHECK(invoke({"bogus"}).code == cli::kUsageError);
  CHECK(invoke({"convert", "-o", "x"}).code == cli::kUsageError);
  const auto missing = invoke({"convert", "-i", "/nonexistent/dir", "-o", "/tmp/x", "--categories", "a"});
  CHECK(missing.code == cli::kUsageError);
  CHECK(missing.err.find("does not exist") != std::string::npos);
  const auto dir = fresh_dir("usage");
  CHECK(invoke({"convert", "-i", dir.string(), "-o", (dir / "o").string()}).code == cli::kUsageError);
  CHECK(invoke({"convert", "-i", dir.string(), "-o", (dir / "o").string(), "--categories", "a",
             "--tau-seg", "1.5"}).code == cli::kUsageError);
  CHECK(invoke({"convert", "-i", dir.string(), "-o", (dir / "o").string(), "--categories", "a,a"})
            .code == cli::kUsageError);
  CHECK(invoke({"--help"}).code == cli::kOk);
}

TEST_CASE("convert on an empty directory") {
  const auto dir = fresh_dir("empty");
  fs::create_directories(dir / "in");
  const auto r = invoke(convert_args(dir / "in", dir / "out"));
  CHECK(r.code == cli::kOk);
  CHECK(r.err.find("warning") != std::string::npos);
  CHECK(slurp(dir / "out" / cli::kPredictionsFile).empty());
  CHECK(read_json(dir / "out" / cli::kSummaryFile)["images"] == 0);
}

TEST_CASE("convert fixture matches golden outputs") {
  const auto dir = fresh_dir("convert");
  write_fixture(dir / "in");
  REQUIRE(invoke(convert_args(dir / "in", dir / "a")).code == cli::kOk);
  check_golden(dir / "a" / cli::kPredictionsFile, "convert_predictions.jsonl");
  check_golden(dir / "a" / cli::kMasksFile, "convert_masks.jsonl");

  const auto preds = records(dir / "a" / cli::kPredictionsFile);
  REQUIRE(preds.size() == 3);
  CHECK(preds[0]["counts"]["airplane"] == 2);
  CHECK(preds[0]["counts"]["ship"] == 1);
  CHECK(preds[2]["counts"]["storage_tank"] == 2);
  CHECK(preds[1]["labels"] == Json::array({"ship", "storage_tank"}));
  const auto semseg = read_pnm(dir / "a" / preds[0]["semseg"].get<std::string>());
  CHECK(semseg.size == Size{64, 48});
  CHECK(semseg.samples[10 * 64 + 10] == 1);  // airplane centre

  SUBCASE("reruns and worker counts give identical bytes") {
    REQUIRE(invoke(convert_args(dir / "in", dir / "b")).code == cli::kOk);
    auto args = convert_args(dir / "in", dir / "c");
    args.insert(args.end(), {"--workers", "4"});
    REQUIRE(invoke(args).code == cli::kOk);
    for (const char* f : {cli::kPredictionsFile, cli::kMasksFile, "semseg/img_2.pgm"}) {
      CHECK(slurp(dir / "b" / f) == slurp(dir / "a" / f));
      CHECK(slurp(dir / "c" / f) == slurp(dir / "a" / f));
    }
  }
  SUBCASE("no-refine merges the touching tanks") {
    auto args = convert_args(dir / "in", dir / "d");
    args.push_back("--no-refine");
    REQUIRE(invoke(args).code == cli::kOk);
    CHECK(records(dir / "d" / cli::kPredictionsFile)[2]["counts"]["storage_tank"] == 1);
  }
  SUBCASE("a broken image is skipped") {
    fs::remove(dir / "in" / "img_1" / "ship.pgm");
    const auto r = invoke(convert_args(dir / "in", dir / "e"));
    CHECK(r.code == cli::kOk);
    CHECK(r.err.find("img_1") != std::string::npos);
    CHECK(records(dir / "e" / cli::kPredictionsFile).size() == 2);
  }
}

TEST_CASE("config file precedence") {
  const auto dir = fresh_dir("config");
  write_fixture(dir / "in");
  // Mean pooling with a tiny threshold labels every class that appears.
  write_file_bytes(dir / "cfg.json", R"({"tau_cls": 0.01, "lambda": 1.0})");
  auto args = convert_args(dir / "in", dir / "file");
  args.insert(args.end(), {"--config", (dir / "cfg.json").string()});
  REQUIRE(invoke(args).code == cli::kOk);
  const auto from_file = records(dir / "file" / cli::kPredictionsFile);
  CHECK(from_file[0]["labels"] == Json::array({"airplane", "ship"}));
  CHECK(from_file[1]["labels"] == Json::array({"ship", "storage_tank"}));

  // The flag wins over the file for tau; lambda still comes from the file,
  // and the small disks' mean stays far below 0.5.
  args = convert_args(dir / "in", dir / "flag");
  args.insert(args.end(), {"--config", (dir / "cfg.json").string(), "--tau-cls", "0.5"});
  REQUIRE(invoke(args).code == cli::kOk);
  for (const auto& p : records(dir / "flag" / cli::kPredictionsFile)) CHECK(p["labels"].empty());

  write_file_bytes(dir / "bad.json", "[1, 2]");
  args = convert_args(dir / "in", dir / "bad");
  args.insert(args.end(), {"--config", (dir / "bad.json").string()});
  CHECK(invoke(args).code == cli::kUsageError);
}

TEST_CASE("eval") {
  const auto dir = fresh_dir("eval");
  write_fixture(dir / "in");
  REQUIRE(invoke(convert_args(dir / "in", dir / "conv")).code == cli::kOk);
  const auto preds = (dir / "conv" / cli::kPredictionsFile).string();
  const auto masks = (dir / "conv" / cli::kMasksFile).string();

  SUBCASE("self evaluation is perfect") {
    REQUIRE(invoke({"eval", "-i", preds, "--gt", preds, "-o", (dir / "r1").string()}).code == cli::kOk);
    const auto r = read_json(dir / "r1" / cli::kReportJson);
    CHECK(r["detection"]["AP50"] == 1.0);
    CHECK(r["multilabel"]["Acc"] == 1.0);
    CHECK(r["scene"]["Acc"] == 1.0);
    CHECK(r["counting"]["Acc"] == 1.0);

    REQUIRE(invoke({"eval", "-i", masks, "--gt", masks, "-o", (dir / "r2").string()}).code == cli::kOk);
    const auto s = read_json(dir / "r2" / cli::kReportJson);
    CHECK(s["segmentation"]["metrics"]["mIoU"] == 1.0);
    CHECK(s["segmentation"]["metrics"]["oIoU"] == 1.0);
    CHECK(s["grounding"]["metrics"]["AP50"] == 1.0);
    CHECK(slurp(dir / "r2" / cli::kReportText).find("100.00") != std::string::npos);
  }
  SUBCASE("disjoint ids are a data error") {
    std::vector<Json> other = records(preds);
    for (auto& o : other) o["image_id"] = "other_" + o["image_id"].get<std::string>();
    write_jsonl(dir / "other.jsonl", other);
    const auto r = invoke({"eval", "-i", preds, "--gt", (dir / "other.jsonl").string(), "-o",
                        (dir / "r3").string()});
    CHECK(r.code == cli::kDataError);
  }
  SUBCASE("partial overlap warns and scores the matched part") {
    std::vector<Json> gt = records(preds);
    gt.pop_back();
    gt[0]["counts"]["airplane"] = 5;
    write_jsonl(dir / "gt.jsonl", gt);
    const auto r = invoke({"eval", "-i", preds, "--gt", (dir / "gt.jsonl").string(), "-o",
                        (dir / "r4").string()});
    CHECK(r.code == cli::kOk);
    CHECK(r.err.find("unmatched") != std::string::npos);
    const auto rep = read_json(dir / "r4" / cli::kReportJson);
    CHECK(rep["matched"] == 2);
    CHECK(rep["counting"]["Acc"].get<double>() < 1.0);
  }
}

TEST_CASE("curate") {
  const auto dir = fresh_dir("curate");
  const auto input = write_curate_input(dir).string();
  const auto vocab = (dir / "vocab.json").string();
  auto base = [&](const std::string& out) {
    return std::vector<std::string>{"curate", "-i", input, "-o", (dir / out).string(), "--vocab",
                                    vocab, "--seed", "7"};
  };

  SUBCASE("stub scorer removes the planted errors") {
    auto args = base("a");
    args.insert(args.end(), {"--scorer-stub", "--zero-per-image", "2"});
    const auto r = invoke(args);
    REQUIRE(r.code == cli::kOk);
    CHECK(r.err.find("candidates.jsonl:24") != std::string::npos);
    const auto acc = records(dir / "a" / cli::kAcceptedFile);
    const auto rej = records(dir / "a" / cli::kRejectedFile);
    CHECK(rej.size() == 6);
    for (const auto& j : rej) CHECK(j["expression"].get<std::string>().find("parking") != std::string::npos);
    // 2 images x (2 categories + 2 null) + 1 ready-made + 14 candidates.
    CHECK(acc.size() == 8 + 1 + 14);
    const auto summary = read_json(dir / "a" / cli::kSummaryFile);
    CHECK(summary["accepted_per_strategy"]["one-to-zero"] == 4);
    CHECK(summary["accepted_per_strategy"]["vlm-attribute"] == 14);
    for (const auto& j : acc) {
      if (j["strategy"] != "one-to-zero") continue;
      const auto cat = j["categories"][0].get<std::string>();
      CHECK(cat != "ship");
      CHECK(cat != "airplane");
      CHECK(mask_from_json(j["mask"]).empty());
    }

    auto again = base("b");
    again.insert(again.end(), {"--scorer-stub", "--zero-per-image", "2"});
    REQUIRE(invoke(again).code == cli::kOk);
    CHECK(slurp(dir / "a" / cli::kAcceptedFile) == slurp(dir / "b" / cli::kAcceptedFile));

    // Accepted output survives a second pass unchanged.
    const std::vector<std::string> second = {"curate", "-i", (dir / "a" / cli::kAcceptedFile).string(),
                                             "-o", (dir / "c").string(), "--vocab", vocab,
                                             "--scorer-stub"};
    REQUIRE(invoke(second).code == cli::kOk);
    CHECK(records(dir / "c" / cli::kAcceptedFile).size() == acc.size());
    CHECK(slurp(dir / "c" / cli::kRejectedFile).empty());
  }
  SUBCASE("zero null triplets by default") {
    auto args = base("z");
    args.push_back("--scorer-stub");
    REQUIRE(invoke(args).code == cli::kOk);
    CHECK(read_json(dir / "z" / cli::kSummaryFile)["accepted_per_strategy"].count("one-to-zero") == 0);
  }
  SUBCASE("no scorer configured") {
    unsetenv("REMOTE_SAM_SCORER_URL");
    CHECK(invoke(base("n")).code == cli::kUsageError);
  }
  SUBCASE("unreachable scorer") {
    int port = 0;
    {
      httplib::Server probe;
      port = probe.bind_to_any_port("127.0.0.1");
    }
    auto args = base("u");
    args.insert(args.end(), {"--scorer-url", "http://127.0.0.1:" + std::to_string(port),
                             "--timeout-ms", "300", "--retries", "0"});
    CHECK(invoke(args).code == cli::kServiceError);
  }
  SUBCASE("stub and url are exclusive") {
    auto args = base("x");
    args.insert(args.end(), {"--scorer-stub", "--scorer-url", "http://127.0.0.1:1"});
    CHECK(invoke(args).code == cli::kUsageError);
  }
}

TEST_CASE("stats") {
  const auto dir = fresh_dir("stats");
  write_file_bytes(dir / "vocab.json", vocab_json().dump());
  const auto vocab = (dir / "vocab.json").string();

  write_file_bytes(dir / "empty.jsonl", "");
  REQUIRE(invoke({"stats", "-i", (dir / "empty.jsonl").string(), "-o", (dir / "e").string(), "--vocab",
               vocab}).code == cli::kOk);
  CHECK(read_json(dir / "e" / cli::kCoverageJson)["# Samples"] == 0);

  const Json mask = square_mask(Size{4, 4}, BBox{0, 0, 1, 1});
  std::vector<Json> recs = {
      {{"image", "a"}, {"expression", "x"}, {"mask", mask}, {"categories", {"ship"}},
       {"attributes", {"color", "size"}}},
      {{"image", "b"}, {"expression", "y"}, {"mask", mask}, {"categories", {"vehicle_1"}},
       {"attributes", {"color"}}},
      {{"image", "c"}, {"expression", "z"}, {"mask", mask}, {"categories", {"windmill"}},
       {"attributes", {"size", "position"}}},
      {{"image", "d"}, {"expression", "w"}, {"mask", mask}, {"categories", {"ship"}},
       {"attributes", {"color"}}},
  };
  write_jsonl(dir / "t.jsonl", recs);
  std::ofstream(dir / "t.jsonl", std::ios::app) << "not json\n";
  const auto r = invoke({"stats", "-i", (dir / "t.jsonl").string(), "-o", (dir / "s").string(),
                      "--vocab", vocab});
  REQUIRE(r.code == cli::kOk);
  const auto j = read_json(dir / "s" / cli::kCoverageJson);
  CHECK(j["# Samples"] == 4);
  CHECK(std::abs(j["# Attr/Sample"].get<double>() - 1.5) <= 1e-12);
  CHECK(j["# Attr"] == 3);
  CHECK(j["# Cls"] == 2);
  CHECK(j["out_of_vocab"] == Json::array({"windmill"}));
  CHECK(j["malformed_lines"].size() == 1);
  CHECK(slurp(dir / "s" / cli::kCoverageText).find("1.50") != std::string::npos);
}
