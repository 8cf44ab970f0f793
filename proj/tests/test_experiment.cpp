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

#include "srattack/dataset.hpp"
#include "srattack/experiment.hpp"
#include "test_util.hpp"

using namespace srattack;
using srattack::testing::TempDir;

namespace {

AttackConfig corpus_attack(int k) {
  AttackConfig a;
  a.scale_k = k;
  a.sr_backend_id = "bicubic";
  a.face_detector_id = "fixed:32,32,64,64";
  return a;
}

ExperimentSpec corpus_spec(const std::filesystem::path& dir, int n, std::uint64_t seed) {
  make_synthetic_corpus(n, seed, dir / "corpus");
  ExperimentSpec spec;
  spec.name = "unit";
  spec.manifest_path = (dir / "corpus" / "manifest.jsonl").string();
  spec.detector_ids = {"toy:12:32,32,64,64"};
  spec.attack_grid = {std::nullopt, corpus_attack(2), corpus_attack(4)};
  spec.output_dir = (dir / "out").string();
  spec.jobs = 2;
  return spec;
}

}  // namespace

TEST_CASE("similarity_report of a manifest against itself", "[experiment][similarity]") {
  TempDir tmp("simself");
  const auto m = srattack::testing::tiny_corpus(tmp.path, 3, 3,
                                                BoundingBox{16, 16, 32, 32, 1.0});
  const auto table = similarity_report(m, m);
  REQUIRE(table.rows.size() == 2);  // "none" and "test-artifact" groups
  for (const auto& r : table.rows) {
    CHECK(r.mean_ssim == Catch::Approx(1.0).margin(1e-9));
    CHECK(std::isinf(r.mean_psnr));
    CHECK(r.sr_method == "none");
  }
  CHECK(table.region == "full_frame");
  CHECK(detail::fixed(table.rows[0].mean_ssim, 3) == "1.000");
  CHECK(detail::fixed(table.rows[0].mean_psnr, 1) == "inf");
}

TEST_CASE("similarity degrades with scale, per group", "[experiment][similarity]") {
  TempDir tmp("simscale");
  const auto m = make_synthetic_corpus(6, 29, tmp.path / "c");

  const auto attacked2 =
      attack_dataset(m, corpus_attack(2), tmp.path / "a2").manifest;
  const auto attacked4 =
      attack_dataset(m, corpus_attack(4), tmp.path / "a4").manifest;

  const auto t2 = similarity_report(m, attacked2);
  const auto t4 = similarity_report(m, attacked4);
  CHECK(t2.region == "face_crop");
  REQUIRE(t2.rows.size() == 2);
  REQUIRE(t4.rows.size() == 2);
  for (std::size_t i = 0; i < t2.rows.size(); ++i) {
    INFO(t2.rows[i].forgery_method << " ssim x2 " << t2.rows[i].mean_ssim << " x4 "
                                   << t4.rows[i].mean_ssim);
    CHECK(t2.rows[i].mean_ssim > t4.rows[i].mean_ssim);
    CHECK(t2.rows[i].scale == 2);
    CHECK(t4.rows[i].scale == 4);
  }
}

TEST_CASE("similarity_report rejects unaligned manifests", "[experiment][similarity]") {
  TempDir tmp("simbad");
  const auto m = srattack::testing::tiny_corpus(tmp.path, 2, 5,
                                                BoundingBox{16, 16, 32, 32, 1.0});
  DatasetManifest other = m;
  other.entries[0].entry_id = "stranger";
  other.entries[0].path = m.entries[0].path + ".alias";
  std::filesystem::copy_file(m.entries[0].path, other.entries[0].path);
  try {
    similarity_report(m, other);
    FAIL("expected InvalidArgumentError");
  } catch (const InvalidArgumentError& e) {
    CHECK(std::string(e.what()).find("stranger") != std::string::npos);
  }
}

TEST_CASE("single-entry similarity groups carry that entry's values",
          "[experiment][similarity]") {
  TempDir tmp("simone");
  DatasetManifest m;
  const auto img = srattack::testing::smooth_image(7, 32, 32);
  const auto p = tmp.path / "one.png";
  save_png(p, img);
  m.entries.push_back({"one", p.string(), Label::kFake, "X", {}, {}});

  DatasetManifest n = m;
  auto distorted = img;
  srattack::testing::add_checkerboard(distorted, 4, 4, 8, 8, 12);
  const auto q = tmp.path / "one_d.png";
  save_png(q, distorted);
  n.entries[0].path = q.string();

  const auto table = similarity_report(m, n);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0].n == 1);
  CHECK(table.rows[0].mean_ssim == Catch::Approx(ssim(img, distorted)));
  CHECK(table.rows[0].mean_psnr == Catch::Approx(psnr(img, distorted)));
}

TEST_CASE("experiment sweep emits rows with non-increasing auc over K",
          "[experiment][sweep]") {
  TempDir tmp("sweep");
  const auto spec = corpus_spec(tmp.path, 10, 41);
  const auto result = run_experiment(spec);

  REQUIRE(result.rows.size() == 3);
  CHECK(result.failed_cells == 0);
  const double auc_none = result.rows[0].cell.metrics.auc;
  const double auc_k2 = result.rows[1].cell.metrics.auc;
  const double auc_k4 = result.rows[2].cell.metrics.auc;
  INFO("auc none " << auc_none << " k2 " << auc_k2 << " k4 " << auc_k4);
  CHECK(auc_k2 <= auc_none);
  CHECK(auc_k4 <= auc_k2);

  CHECK(std::filesystem::exists(result.csv_path));
  CHECK(std::filesystem::exists(result.json_path));
  CHECK(std::filesystem::exists(tmp.path / "out" / "attacks" / "bicubic_x2_both" /
                                "similarity.csv"));
  CHECK(std::filesystem::exists(tmp.path / "out" / "plots" /
                                "toy_12_32_32_64_64__bicubic.png"));

  // Header order pinned to the paper tables.
  std::ifstream csv(result.csv_path);
  std::string header;
  std::getline(csv, header);
  CHECK(header ==
        "model,forgery_method,sr,sr_method,scale,fnr,fpr,recall,precision,auc,accuracy");

  // Every JSON row carries full provenance.
  nlohmann::json report;
  std::ifstream(result.json_path) >> report;
  CHECK(report.contains("spec_hash"));
  CHECK(report["class_counts"]["pristine"] == 10);
  for (const auto& row : report["rows"]) {
    CHECK(row.contains("detector"));
    CHECK(row["threshold"] == 0.5);
    CHECK(row["counts"].contains("tp"));
    CHECK(row["class_counts"]["fake"] == 10);
    if (!row["attack"].is_null()) CHECK(row.contains("attack_config_hash"));
  }
}

TEST_CASE("rerunning an identical spec yields byte-identical reports",
          "[experiment][sweep]") {
  TempDir tmp("rerun");
  const auto spec = corpus_spec(tmp.path, 6, 43);
  run_experiment(spec);
  const auto csv1 = read_file_bytes(tmp.path / "out" / "report.csv");
  const auto json1 = read_file_bytes(tmp.path / "out" / "report.json");
  run_experiment(spec);
  CHECK(read_file_bytes(tmp.path / "out" / "report.csv") == csv1);
  CHECK(read_file_bytes(tmp.path / "out" / "report.json") == json1);
}

TEST_CASE("spec validation: empty grid and duplicate cells", "[experiment][spec]") {
  ExperimentSpec spec;
  spec.manifest_path = "m.jsonl";
  spec.output_dir = "out";
  spec.detector_ids = {"toy"};
  CHECK_THROWS_AS(spec.validate(), InvalidArgumentError);

  spec.attack_grid = {std::nullopt, std::nullopt};
  CHECK_THROWS_AS(spec.validate(), InvalidArgumentError);

  spec.attack_grid = {std::nullopt, corpus_attack(2)};
  CHECK_NOTHROW(spec.validate());

  const auto j = spec.to_json();
  const auto back = ExperimentSpec::from_json(j);
  CHECK(back.detector_ids == spec.detector_ids);
  REQUIRE(back.attack_grid.size() == 2);
  CHECK(!back.attack_grid[0].has_value());
  CHECK(back.attack_grid[1]->scale_k == 2);
}

TEST_CASE("attack configs sharing a tag do not share attacked trees",
          "[experiment][sweep]") {
  TempDir tmp("tagclash");
  auto spec = corpus_spec(tmp.path, 4, 53);
  // Same backend/scale/scope, different margin: distinct attacks, same tag.
  auto wide = corpus_attack(2);
  wide.face_margin = 0.2;
  spec.attack_grid = {corpus_attack(2), wide};
  const auto result = run_experiment(spec);
  REQUIRE(result.rows.size() == 2);
  CHECK(result.failed_cells == 0);
  // The margin grows the rewritten region, so the two cells must differ in
  // what the detector saw: their attacked trees are not the same files.
  std::vector<std::filesystem::path> dirs;
  for (const auto& d :
       std::filesystem::directory_iterator(tmp.path / "out" / "attacks")) {
    dirs.push_back(d.path());
  }
  CHECK(dirs.size() == 2);
}

TEST_CASE("failed cells are recorded and the sweep continues", "[experiment][sweep]") {
  TempDir tmp("failcell");
  auto spec = corpus_spec(tmp.path, 4, 47);
  spec.detector_ids = {"toy:12:32,32,64,64", (tmp.path / "missing_artifact.json").string()};
  const auto result = run_experiment(spec);
  REQUIRE(result.rows.size() == 6);
  CHECK(result.failed_cells == 3);
  CHECK(!result.all_failed());
  long good = 0;
  for (const auto& row : result.rows) {
    if (!row.failed) ++good;
  }
  CHECK(good == 3);
}
