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

// srattack CLI. Exit codes: 0 success (possibly with warnings), 1 run-level
// failure, 2 usage/spec error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <opencv2/core/utils/logger.hpp>

#include "srattack/attack.hpp"
#include "srattack/dataset.hpp"
#include "srattack/eval.hpp"
#include "srattack/experiment.hpp"
#include "srattack/trainer.hpp"
#include "srattack/version.hpp"

namespace {

using namespace srattack;

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgumentError("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgumentError("bad JSON in " + path + ": " + e.what());
  }
  return j;
}

std::string strip_suffix(std::string s, const std::string& suffix) {
  if (s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix) {
    s.resize(s.size() - suffix.size());
  }
  return s;
}

void write_single_row_reports(const std::string& out_prefix, const std::string& detector,
                              const std::string& forgery, const CellResult& cell,
                              const std::optional<AttackConfig>& attack,
                              const nlohmann::json& manifest_metadata) {
  const std::filesystem::path csv_path = out_prefix + ".csv";
  std::error_code ec;
  std::filesystem::create_directories(csv_path.parent_path(), ec);
  std::ofstream csv(csv_path, std::ios::trunc);
  csv << "model,forgery_method,sr,sr_method,scale,fnr,fpr,recall,precision,auc,accuracy\n";
  const auto& m = cell.metrics;
  csv << detail::csv_field(detector) << "," << detail::csv_field(forgery) << ","
      << (attack ? "yes" : "no") << ","
      << detail::csv_field(attack ? attack->sr_backend_id : "none") << ","
      << (attack ? attack->scale_k : 0) << "," << percent(m.fnr) << "," << percent(m.fpr)
      << "," << percent(m.recall) << "," << percent(m.precision) << "," << percent(m.auc)
      << "," << percent(m.accuracy) << "\n";

  nlohmann::json j{{"version", kVersion},
                   {"detector", detector},
                   {"forgery_method", forgery},
                   {"attack", attack ? attack->to_json() : nlohmann::json()},
                   {"threshold", cell.threshold},
                   {"aggregation", aggregation_name(cell.aggregation)},
                   {"counts",
                    {{"tp", cell.counts.tp},
                     {"fp", cell.counts.fp},
                     {"tn", cell.counts.tn},
                     {"fn", cell.counts.fn}}},
                   {"scored", cell.scored},
                   {"skipped_no_face", cell.skipped_no_face},
                   {"score_failures", cell.score_failures},
                   {"attack_failures", cell.attack_failures},
                   {"metrics",
                    {{"fnr", m.fnr},
                     {"fpr", m.fpr},
                     {"recall", m.recall},
                     {"precision", m.precision},
                     {"auc", m.auc},
                     {"accuracy", m.accuracy}}},
                   {"manifest_metadata", manifest_metadata}};
  if (attack) j["attack_config_hash"] = to_hex(fnv1a64(attack->to_json().dump()));
  std::ofstream json_out(out_prefix + ".json", std::ios::trunc);
  json_out << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  cv::utils::logging::setLogLevel(cv::utils::logging::LOG_LEVEL_ERROR);

  CLI::App app{"super-resolution round-trip attacks on deepfake detectors: "
               "attack, evaluate, defend"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  // Let --model-root / --jobs appear after the subcommand too.
  app.fallthrough();

  std::string model_root;
  app.add_option("--model-root", model_root,
                 "directory with model artifacts (default: $SRATTACK_MODEL_ROOT)");
  int jobs = 0;
  app.add_option("--jobs", jobs, "worker threads (default: hardware concurrency)");

  // corpus ------------------------------------------------------------------
  auto* corpus = app.add_subcommand("corpus", "generate the synthetic desk corpus");
  int corpus_n = 100;
  std::uint64_t corpus_seed = 7;
  std::string corpus_out;
  CorpusOptions corpus_opt;
  corpus->add_option("--n", corpus_n, "images per class")->capture_default_str();
  corpus->add_option("--seed", corpus_seed, "rng seed")->capture_default_str();
  corpus->add_option("--out", corpus_out, "output directory")->required();
  corpus->add_option("--size", corpus_opt.image_size, "image side length")
      ->capture_default_str();
  corpus->add_option("--amplitude", corpus_opt.artifact_amplitude,
                     "checkerboard artifact amplitude")
      ->capture_default_str();
  corpus->add_option("--noise-sigma", corpus_opt.noise_sigma, "pristine noise sigma")
      ->capture_default_str();

  // scan ----------------------------------------------------------------
  auto* scan = app.add_subcommand("scan", "build a manifest from a directory tree");
  std::string scan_root, scan_layout = "flat", scan_out;
  scan->add_option("--root", scan_root, "dataset root")->required();
  scan->add_option("--layout", scan_layout, "flat | ffpp | synthetic-pairs")
      ->capture_default_str();
  scan->add_option("--out", scan_out, "manifest path to write")->required();

  // extract-frames -------------------------------------------------------
  auto* frames = app.add_subcommand("extract-frames", "decode video frames to PNG");
  std::string frames_video, frames_out, frames_label = "pristine",
                            frames_method = kNoForgery;
  int frames_stride = 10;
  frames->add_option("--video", frames_video, "video file")->required();
  frames->add_option("--stride", frames_stride, "keep every stride-th frame")
      ->capture_default_str();
  frames->add_option("--out", frames_out, "output directory")->required();
  frames->add_option("--label", frames_label, "pristine | fake")->capture_default_str();
  frames->add_option("--method", frames_method, "forgery method tag for fake frames")
      ->capture_default_str();

  // attack ----------------------------------------------------------------
  auto* attack = app.add_subcommand("attack", "apply the SR round-trip attack to a manifest");
  std::string attack_manifest, attack_out, attack_sr = "bicubic",
                               attack_scope = "both", attack_detector = "full-frame";
  int attack_scale = 2;
  double attack_margin = 0.0, attack_max_fail = 0.25;
  attack->add_option("--manifest", attack_manifest, "input manifest")->required();
  attack->add_option("--out", attack_out, "output directory")->required();
  attack->add_option("--scale", attack_scale, "scale factor K")->capture_default_str();
  attack->add_option("--sr", attack_sr, "SR backend id")->capture_default_str();
  attack->add_option("--scope", attack_scope, "both | fake-only")->capture_default_str();
  attack->add_option("--detector", attack_detector, "face detector id")
      ->capture_default_str();
  attack->add_option("--margin", attack_margin, "fractional face-box margin")
      ->capture_default_str();
  attack->add_option("--max-failure-fraction", attack_max_fail,
                     "per-entry failure budget before the run fails")
      ->capture_default_str();

  // eval ------------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "score a manifest and compute the metric table");
  std::string eval_manifest, eval_detector, eval_attack_config, eval_out = "report";
  double eval_threshold = 0.5;
  eval->add_option("--manifest", eval_manifest, "manifest to score")->required();
  eval->add_option("--detector", eval_detector,
                   "detector id or artifact path (const:<v> | toy[:t[:box]] | *.json)")
      ->required();
  eval->add_option("--attack-config", eval_attack_config,
                   "optional AttackConfig JSON applied before scoring");
  eval->add_option("--threshold", eval_threshold, "decision threshold")
      ->capture_default_str();
  std::string eval_aggregation = "frame";
  eval->add_option("--aggregate", eval_aggregation, "frame | video-majority")
      ->capture_default_str();
  eval->add_option("--out", eval_out, "report path prefix (writes .csv and .json)")
      ->capture_default_str();

  // similarity --------------------------------------------------------------
  auto* similarity = app.add_subcommand("similarity",
                                        "SSIM/PSNR between aligned manifests");
  std::string sim_original, sim_attacked, sim_out = "similarity";
  similarity->add_option("--original", sim_original, "pre-attack manifest")->required();
  similarity->add_option("--attacked", sim_attacked, "post-attack manifest")->required();
  similarity->add_option("--out", sim_out, "output path prefix (writes .csv and .json)")
      ->capture_default_str();

  // train -----------------------------------------------------------------
  auto* train = app.add_subcommand("train", "fit a detector through an augmentation policy");
  std::string train_manifest, train_policy, train_trainer = "toy",
                              train_out = "detector.artifact.json";
  int train_epochs = 1;
  train->add_option("--manifest", train_manifest, "training manifest")->required();
  train->add_option("--policy", train_policy, "AugmentationPolicy JSON path")->required();
  train->add_option("--trainer", train_trainer, "toy | external")->capture_default_str();
  train->add_option("--epochs", train_epochs, "stream passes")->capture_default_str();
  train->add_option("--out", train_out, "detector artifact path")->capture_default_str();

  // report ------------------------------------------------------------------
  auto* report = app.add_subcommand("report", "run a full experiment spec (grid sweep)");
  std::string report_spec, report_manifest, report_out;
  double report_threshold = -1.0;
  report->add_option("--spec", report_spec, "ExperimentSpec JSON path")->required();
  report->add_option("--manifest", report_manifest, "override spec.manifest");
  report->add_option("--out", report_out, "override spec.output_dir");
  report->add_option("--threshold", report_threshold, "override spec.threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*corpus) {
      corpus_opt.jobs = jobs;
      const int side = corpus_opt.image_size;
      corpus_opt.face_box = Region{side / 4, side / 4, side / 2, side / 2};
      const auto m = make_synthetic_corpus(corpus_n, corpus_seed, corpus_out, corpus_opt);
      std::printf("corpus: %ld pristine + %ld fake under %s\n",
                  m.count(Label::kPristine), m.count(Label::kFake), corpus_out.c_str());
    } else if (*scan) {
      const auto m = build_manifest(scan_root, parse_layout(scan_layout));
      write_manifest(m, scan_out);
      const auto balance = balance_check(m);
      std::printf("manifest: %zu entries (%ld pristine / %ld fake, %s) -> %s\n",
                  m.entries.size(), balance.pristine_count, balance.fake_count,
                  balance.balanced ? "balanced" : "unbalanced", scan_out.c_str());
      if (balance.empty_warning) std::fprintf(stderr, "warning: empty manifest\n");
    } else if (*frames) {
      auto entries = extract_frames(frames_video, frames_stride, frames_out);
      const Label label = parse_label(frames_label);
      for (auto& e : entries) {
        e.label = label;
        e.forgery_method = label == Label::kFake ? frames_method : kNoForgery;
      }
      DatasetManifest m;
      m.entries = std::move(entries);
      m.metadata = {{"source", frames_video}, {"stride", frames_stride}};
      write_manifest(m, std::filesystem::path(frames_out) / "manifest.jsonl");
      std::printf("extracted %zu frames -> %s\n", m.entries.size(), frames_out.c_str());
    } else if (*attack) {
      AttackConfig cfg;
      cfg.scale_k = attack_scale;
      cfg.sr_backend_id = attack_sr;
      cfg.face_detector_id = attack_detector;
      cfg.scope = parse_attack_scope(attack_scope);
      cfg.face_margin = attack_margin;
      cfg.validate();
      AttackRunOptions opt;
      opt.jobs = jobs;
      opt.model_root = model_root;
      opt.max_failure_fraction = attack_max_fail;
      const auto run = attack_dataset(read_manifest(attack_manifest), cfg, attack_out, opt);
      std::printf("attacked %ld, copied %ld, skipped(no face) %ld, failed %ld -> %s\n",
                  run.attacked, run.copied, run.skipped_no_face, run.failed,
                  attack_out.c_str());
      if (run.failed > 0) std::fprintf(stderr, "warning: %ld entries failed\n", run.failed);
    } else if (*eval) {
      std::optional<AttackConfig> attack_cfg;
      if (!eval_attack_config.empty()) {
        attack_cfg = AttackConfig::from_json(load_json_file(eval_attack_config));
      }
      EvalOptions opt;
      opt.jobs = jobs;
      opt.model_root = model_root;
      opt.aggregation = parse_aggregation(eval_aggregation);
      const std::string prefix = strip_suffix(strip_suffix(eval_out, ".csv"), ".json");
      const auto manifest = read_manifest(eval_manifest);
      const auto cell = evaluate_cell(manifest, eval_detector, attack_cfg, eval_threshold,
                                      std::filesystem::path(prefix + ".attacked"), opt);
      write_single_row_reports(prefix, eval_detector,
                               detail::manifest_forgery_tag(manifest), cell, attack_cfg,
                               manifest.metadata);
      std::printf("fnr %s%%  fpr %s%%  auc %s%%  accuracy %s%%  -> %s.csv\n",
                  percent(cell.metrics.fnr).c_str(), percent(cell.metrics.fpr).c_str(),
                  percent(cell.metrics.auc).c_str(),
                  percent(cell.metrics.accuracy).c_str(), prefix.c_str());
    } else if (*similarity) {
      const auto table =
          similarity_report(read_manifest(sim_original), read_manifest(sim_attacked));
      const std::string prefix = strip_suffix(strip_suffix(sim_out, ".csv"), ".json");
      write_similarity_csv(table, prefix + ".csv");
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& r : table.rows) {
        rows.push_back({{"forgery_method", r.forgery_method},
                        {"sr_method", r.sr_method},
                        {"scale", r.scale},
                        {"n", r.n},
                        {"ssim", r.mean_ssim},
                        {"psnr_db", std::isinf(r.mean_psnr) ? nlohmann::json("inf")
                                                            : nlohmann::json(r.mean_psnr)}});
      }
      std::ofstream json_out(prefix + ".json", std::ios::trunc);
      json_out << nlohmann::json{{"version", kVersion},
                                 {"region", table.region},
                                 {"skipped_no_face", table.skipped_no_face},
                                 {"rows", rows}}
                      .dump(2)
               << "\n";
      std::printf("%zu similarity groups (%s) -> %s.csv\n", table.rows.size(),
                  table.region.c_str(), prefix.c_str());
    } else if (*train) {
      if (train_trainer != "toy") {
        std::fprintf(stderr,
                     "error: only the bundled 'toy' trainer is available from the CLI; "
                     "external trainers plug in through the library Trainer port\n");
        return 2;
      }
      const auto policy = AugmentationPolicy::from_json(load_json_file(train_policy));
      ToyTrainer trainer;
      TrainOptions opt;
      opt.jobs = jobs;
      opt.epochs = train_epochs;
      opt.model_root = model_root;
      const auto artifact =
          train_with_augmentation(read_manifest(train_manifest), policy, trainer, opt);
      save_detector_artifact(artifact, train_out);
      std::printf("trained toy detector: threshold %.4f, balanced accuracy %.3f -> %s\n",
                  artifact["laplacian_threshold"].get<double>(),
                  trainer.best_balanced_accuracy(), train_out.c_str());
    } else if (*report) {
      auto spec = ExperimentSpec::from_json(load_json_file(report_spec));
      if (!report_manifest.empty()) spec.manifest_path = report_manifest;
      if (!report_out.empty()) spec.output_dir = report_out;
      if (report_threshold >= 0.0) spec.threshold = report_threshold;
      spec.jobs = jobs;
      spec.model_root = model_root;
      spec.validate();
      const auto result = run_experiment(spec);
      std::printf("%zu cells (%ld failed) -> %s\n", result.rows.size(),
                  result.failed_cells, result.csv_path.string().c_str());
      if (result.all_failed()) {
        std::fprintf(stderr, "error: every cell failed\n");
        return 1;
      }
      if (result.failed_cells > 0) {
        std::fprintf(stderr, "warning: %ld cells failed; see report.json\n",
                     result.failed_cells);
      }
    }
  } catch (const InvalidArgumentError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const LayoutError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
