// Copyright 2026 The srattack Authors
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

#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include <opencv2/imgcodecs.hpp>

#include "srattack/io_image.hpp"
#include "srattack/manifest.hpp"
#include "srattack/quality.hpp"
#include "test_util.hpp"

using namespace srattack;
using srattack::testing::random_image;
using srattack::testing::TempDir;

TEST_CASE("png save/load round-trips bit-identically", "[io]") {
  TempDir tmp("io_png");
  const auto img = random_image(1, 37, 53);
  const auto path = tmp.path / "x.png";
  save_png(path, img);
  CHECK(load_image(path) == img);
}

TEST_CASE("loader rejects missing, corrupt, and off-contract files", "[io]") {
  TempDir tmp("io_reject");

  CHECK_THROWS_AS(load_image(tmp.path / "missing.png"), IngestionError);

  const auto junk = tmp.path / "junk.png";
  std::ofstream(junk) << "not a png";
  CHECK_THROWS_AS(load_image(junk), IngestionError);

  const auto gray = tmp.path / "gray.png";
  cv::imwrite(gray.string(), cv::Mat(8, 8, CV_8UC1, cv::Scalar(7)));
  CHECK_THROWS_AS(load_image(gray), IngestionError);

  const auto deep = tmp.path / "deep.png";
  cv::imwrite(deep.string(), cv::Mat(8, 8, CV_16UC3, cv::Scalar(7, 7, 7)));
  CHECK_THROWS_AS(load_image(deep), IngestionError);
}

TEST_CASE("jpeg ingestion works and lower quality hurts fidelity", "[io]") {
  TempDir tmp("io_jpeg");
  const auto img = srattack::testing::smooth_image(5, 48, 48);
  cv::imwrite((tmp.path / "x.jpg").string(), to_bgr_mat(img),
              {cv::IMWRITE_JPEG_QUALITY, 95});
  const auto loaded = load_image(tmp.path / "x.jpg");
  CHECK(loaded.height == 48);
  CHECK(loaded.width == 48);

  const auto q90 = jpeg_roundtrip(img, 90);
  const auto q30 = jpeg_roundtrip(img, 30);
  CHECK(mse(img, q30) >= mse(img, q90));
}

TEST_CASE("manifest write/read round-trip preserves structure", "[manifest]") {
  TempDir tmp("manifest_rt");
  DatasetManifest m;
  m.metadata = {{"source", "unit"}, {"split", "test"}};
  m.entries.push_back({"a", "/data/a.png", Label::kPristine, kNoForgery,
                       std::nullopt, std::nullopt});
  ManifestEntry fake{"b", "/data/b.png", Label::kFake, "Deepfakes",
                     std::string("vid_003"), 42};
  fake.skipped_no_face = true;
  fake.boxes.push_back(BoundingBox{1, 2, 3, 4, 1.0});
  m.entries.push_back(fake);

  const auto path = tmp.path / "m.jsonl";
  write_manifest(m, path);
  const auto r = read_manifest(path);

  REQUIRE(r.entries.size() == 2);
  CHECK(r.metadata["source"] == "unit");
  CHECK(r.entries[0].entry_id == "a");
  CHECK(r.entries[0].label == Label::kPristine);
  CHECK(r.entries[1].forgery_method == "Deepfakes");
  CHECK(r.entries[1].source_video == "vid_003");
  CHECK(r.entries[1].frame_index == 42);
  CHECK(r.entries[1].skipped_no_face);
  REQUIRE(r.entries[1].boxes.size() == 1);
  CHECK(r.entries[1].boxes[0] == BoundingBox{1, 2, 3, 4});
}

TEST_CASE("manifest invariants are enforced", "[manifest]") {
  DatasetManifest dup_id;
  dup_id.entries.push_back({"a", "/1.png", Label::kPristine, kNoForgery, {}, {}});
  dup_id.entries.push_back({"a", "/2.png", Label::kPristine, kNoForgery, {}, {}});
  CHECK_THROWS_AS(dup_id.validate(), InvalidArgumentError);

  DatasetManifest dup_path;
  dup_path.entries.push_back({"a", "/1.png", Label::kPristine, kNoForgery, {}, {}});
  dup_path.entries.push_back({"b", "/1.png", Label::kPristine, kNoForgery, {}, {}});
  CHECK_THROWS_AS(dup_path.validate(), InvalidArgumentError);

  DatasetManifest bad_tag;
  bad_tag.entries.push_back({"a", "/1.png", Label::kPristine, "Deepfakes", {}, {}});
  CHECK_THROWS_AS(bad_tag.validate(), InvalidArgumentError);
}

TEST_CASE("balance_check counts and flags", "[manifest]") {
  DatasetManifest m;
  for (int i = 0; i < 5; ++i) {
    m.entries.push_back({"p" + std::to_string(i), "/p" + std::to_string(i),
                         Label::kPristine, kNoForgery, {}, {}});
    m.entries.push_back({"f" + std::to_string(i), "/f" + std::to_string(i),
                         Label::kFake, "X", {}, {}});
  }
  auto r = balance_check(m);
  CHECK(r.balanced);
  CHECK(r.pristine_count == 5);
  CHECK(r.fake_count == 5);
  CHECK(!r.empty_warning);

  m.entries.push_back({"f9", "/f9", Label::kFake, "X", {}, {}});
  r = balance_check(m);
  CHECK(!r.balanced);

  const auto empty = balance_check(DatasetManifest{});
  CHECK(empty.balanced);
  CHECK(empty.empty_warning);
}
