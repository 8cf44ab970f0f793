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

// Experiment sweeps: a (detector x attack) grid over one manifest, reduced
// to paper-table-shaped CSV rows, a lossless JSON report, per-attack
// perceptual-similarity tables, and metric-vs-scale plots.

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "srattack/eval.hpp"
#include "srattack/io_image.hpp"
#include "srattack/plot.hpp"
#include "srattack/quality.hpp"

namespace srattack {

// ---------------------------------------------------------------------------
// Similarity tables (pre- vs post-attack)

struct SimilarityRow {
  std::string forgery_method;
  std::string sr_method;
  int scale = 0;
  long n = 0;
  double mean_ssim = 0.0;
  double mean_psnr = 0.0;  // +inf when every pair is identical
};

struct SimilarityTable {
  std::vector<SimilarityRow> rows;
  std::string region;  // "face_crop" or "full_frame"
  long skipped_no_face = 0;
};

/// Compare aligned manifests entry by entry, grouped by forgery method (the
/// attacked manifest contributes one (sr_method, K) pair). When the attacked
/// entries carry face boxes the metrics are computed on those crops — the
/// region the attack actually rewrote — otherwise on the whole frame; the
/// choice is recorded in the table.
inline SimilarityTable similarity_report(const DatasetManifest& original,
                                         const DatasetManifest& attacked) {
  original.validate();
  attacked.validate();
  std::map<std::string, const ManifestEntry*> by_id;
  for (const auto& e : original.entries) by_id[e.entry_id] = &e;

  std::string missing;
  long missing_count = 0;
  for (const auto& e : attacked.entries) {
    if (!by_id.count(e.entry_id)) {
      if (++missing_count <= 5) missing += (missing.empty() ? "" : ", ") + e.entry_id;
    }
  }
  if (missing_count > 0) {
    throw InvalidArgumentError("similarity_report: " + std::to_string(missing_count) +
                               " attacked entries missing from the original manifest: " +
                               missing);
  }

  std::string sr_method = "none";
  int scale = 0;
  if (attacked.metadata.contains("attack")) {
    const auto& a = attacked.metadata["attack"];
    sr_method = a.value("sr_backend", "none");
    scale = a.value("scale_k", 0);
  }

  bool any_boxes = false;
  for (const auto& e : attacked.entries) any_boxes |= !e.boxes.empty();

  struct Acc {
    long n = 0;
    double ssim_sum = 0.0;
    double psnr_sum = 0.0;
  };
  std::map<std::string, Acc> groups;
  long skipped = 0;

  for (const auto& e : attacked.entries) {
    if (e.skipped_no_face) {
      ++skipped;
      continue;
    }
    const ImageTensor before = load_image(by_id.at(e.entry_id)->path);
    const ImageTensor after = load_image(e.path);
    if (!before.same_size(after)) {
      throw InvalidArgumentError("similarity_report: size mismatch for entry '" +
                                 e.entry_id + "'");
    }
    double s, p;
    if (!e.boxes.empty()) {
      double ss = 0.0, pp = 0.0;
      for (const auto& b : e.boxes) {
        const auto cb = crop(before, b).image;
        const auto ca = crop(after, b).image;
        ss += ssim(cb, ca);
        pp += psnr(cb, ca);
      }
      s = ss / static_cast<double>(e.boxes.size());
      p = pp / static_cast<double>(e.boxes.size());
    } else {
      s = ssim(before, after);
      p = psnr(before, after);
    }
    auto& acc = groups[e.forgery_method];
    ++acc.n;
    acc.ssim_sum += s;
    acc.psnr_sum += p;
  }

  SimilarityTable table;
  table.region = any_boxes ? "face_crop" : "full_frame";
  table.skipped_no_face = skipped;
  for (const auto& [method, acc] : groups) {
    table.rows.push_back({method, sr_method, scale, acc.n, acc.ssim_sum / acc.n,
                          acc.psnr_sum / acc.n});
  }
  return table;
}

// ---------------------------------------------------------------------------
// Rendering helpers

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  return out + "\"";
}

/// Fixed decimals, rounded half away from zero; "inf" for infinities.
inline std::string fixed(double v, int decimals) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  double scale = 1.0;
  for (int i = 0; i < decimals; ++i) scale *= 10.0;
  const long long units = std::llround(v * scale);
  const long long whole = units / static_cast<long long>(scale);
  long long frac = std::llabs(units % static_cast<long long>(scale));
  std::string out = std::to_string(whole) + ".";
  std::string f = std::to_string(frac);
  out += std::string(static_cast<std::size_t>(decimals) - f.size(), '0') + f;
  return out;
}

}  // namespace detail

inline void write_similarity_csv(const SimilarityTable& table,
                                 const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::trunc);
  out << "forgery_method,sr_method,scale,n,ssim,psnr_db\n";
  for (const auto& r : table.rows) {
    out << detail::csv_field(r.forgery_method) << "," << detail::csv_field(r.sr_method)
        << "," << r.scale << "," << r.n << "," << detail::fixed(r.mean_ssim, 3) << ","
        << detail::fixed(r.mean_psnr, 1) << "\n";
  }
}

// ---------------------------------------------------------------------------
// Experiment specs

struct ExperimentSpec {
  std::string name = "experiment";
  std::string manifest_path;
  std::vector<std::string> detector_ids;
  std::vector<std::optional<AttackConfig>> attack_grid;  // nullopt = no attack
  double threshold = 0.5;
  Aggregation aggregation = Aggregation::kFrame;
  std::string output_dir;
  bool emit_similarity = true;
  bool emit_plots = true;
  int jobs = 0;
  std::string model_root;

  void validate() const {
    if (manifest_path.empty()) throw InvalidArgumentError("spec: manifest_path missing");
    if (output_dir.empty()) throw InvalidArgumentError("spec: output_dir missing");
    if (detector_ids.empty()) throw InvalidArgumentError("spec: no detectors");
    if (attack_grid.empty()) throw InvalidArgumentError("spec: empty attack grid");
    if (threshold < 0.0 || threshold > 1.0) {
      throw InvalidArgumentError("spec: threshold must be in [0,1]");
    }
    std::set<std::string> cells;
    for (const auto& d : detector_ids) {
      for (const auto& a : attack_grid) {
        const std::string key = d + "|" + (a ? a->to_json().dump() : "none");
        if (!cells.insert(key).second) {
          throw InvalidArgumentError("spec: duplicate cell " + key);
        }
      }
    }
    for (const auto& a : attack_grid) {
      if (a) a->validate();
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json grid = nlohmann::json::array();
    for (const auto& a : attack_grid) grid.push_back(a ? a->to_json() : nlohmann::json());
    return {{"name", name},
            {"manifest", manifest_path},
            {"detectors", detector_ids},
            {"attack_grid", grid},
            {"threshold", threshold},
            {"aggregation", aggregation_name(aggregation)},
            {"output_dir", output_dir},
            {"emit_similarity", emit_similarity},
            {"emit_plots", emit_plots}};
  }

  static ExperimentSpec from_json(const nlohmann::json& j) {
    ExperimentSpec s;
    s.name = j.value("name", s.name);
    s.manifest_path = j.value("manifest", "");
    if (j.contains("detectors")) {
      for (const auto& d : j["detectors"]) s.detector_ids.push_back(d.get<std::string>());
    }
    if (j.contains("attack_grid")) {
      for (const auto& a : j["attack_grid"]) {
        if (a.is_null()) s.attack_grid.emplace_back(std::nullopt);
        else s.attack_grid.emplace_back(AttackConfig::from_json(a));
      }
    }
    s.threshold = j.value("threshold", s.threshold);
    s.aggregation = parse_aggregation(j.value("aggregation", "frame"));
    s.output_dir = j.value("output_dir", "");
    s.emit_similarity = j.value("emit_similarity", true);
    s.emit_plots = j.value("emit_plots", true);
    s.validate();
    return s;
  }
};

struct ExperimentRow {
  std::string detector_id;
  std::optional<AttackConfig> attack;
  bool failed = false;
  std::string error;
  CellResult cell;
  std::string forgery_method;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  long failed_cells = 0;
  std::filesystem::path csv_path;
  std::filesystem::path json_path;

  bool all_failed() const {
    return !rows.empty() && failed_cells == static_cast<long>(rows.size());
  }
};

namespace detail {

inline std::string manifest_forgery_tag(const DatasetManifest& m) {
  std::set<std::string> methods;
  for (const auto& e : m.entries) {
    if (e.label == Label::kFake) methods.insert(e.forgery_method);
  }
  if (methods.empty()) return "none";
  if (methods.size() == 1) return *methods.begin();
  return "mixed";
}

inline void write_experiment_csv(const ExperimentResult& result,
                                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  out << "model,forgery_method,sr,sr_method,scale,fnr,fpr,recall,precision,auc,accuracy\n";
  for (const auto& row : result.rows) {
    if (row.failed) continue;
    const auto& m = row.cell.metrics;
    out << csv_field(row.detector_id) << "," << csv_field(row.forgery_method) << ","
        << (row.attack ? "yes" : "no") << ","
        << csv_field(row.attack ? row.attack->sr_backend_id : "none") << ","
        << (row.attack ? row.attack->scale_k : 0) << "," << percent(m.fnr) << ","
        << percent(m.fpr) << "," << percent(m.recall) << "," << percent(m.precision)
        << "," << percent(m.auc) << "," << percent(m.accuracy) << "\n";
  }
}

inline nlohmann::json row_json(const ExperimentRow& row) {
  nlohmann::json j{{"detector", row.detector_id},
                   {"forgery_method", row.forgery_method},
                   {"attack", row.attack ? row.attack->to_json() : nlohmann::json()}};
  if (row.attack) {
    j["attack_config_hash"] = to_hex(fnv1a64(row.attack->to_json().dump()));
  }
  if (row.failed) {
    j["failed"] = true;
    j["error"] = row.error;
    return j;
  }
  const auto& c = row.cell;
  j["threshold"] = c.threshold;
  j["aggregation"] = aggregation_name(c.aggregation);
  j["counts"] = {{"tp", c.counts.tp}, {"fp", c.counts.fp}, {"tn", c.counts.tn},
                 {"fn", c.counts.fn}};
  j["class_counts"] = {{"fake", c.counts.fakes()}, {"pristine", c.counts.pristine()}};
  j["scored"] = c.scored;
  j["skipped_no_face"] = c.skipped_no_face;
  j["score_failures"] = c.score_failures;
  j["attack_failures"] = c.attack_failures;
  j["metrics"] = {{"fnr", c.metrics.fnr},         {"fpr", c.metrics.fpr},
                  {"recall", c.metrics.recall},   {"precision", c.metrics.precision},
                  {"auc", c.metrics.auc},         {"accuracy", c.metrics.accuracy}};
  return j;
}

inline void emit_experiment_plots(const ExperimentSpec& spec,
                                  const ExperimentResult& result,
                                  const std::filesystem::path& dir) {
  // One chart per (detector, sr_method): FNR/FPR/AUC over the scales that
  // appear in the grid, with the no-attack cell leading as "none".
  for (const auto& detector : spec.detector_ids) {
    std::map<std::string, std::map<int, const ExperimentRow*>> by_method;
    const ExperimentRow* baseline = nullptr;
    for (const auto& row : result.rows) {
      if (row.detector_id != detector || row.failed) continue;
      if (!row.attack) baseline = &row;
      else by_method[row.attack->sr_backend_id][row.attack->scale_k] = &row;
    }
    for (const auto& [method, cells] : by_method) {
      std::vector<std::string> labels;
      PlotSeries fnr{"FNR", {}}, fpr{"FPR", {}}, auc_s{"AUC", {}};
      const auto push = [&](const std::string& label, const ExperimentRow* row) {
        labels.push_back(label);
        fnr.values.push_back(row->cell.metrics.fnr * 100.0);
        fpr.values.push_back(row->cell.metrics.fpr * 100.0);
        auc_s.values.push_back(row->cell.metrics.auc * 100.0);
      };
      if (baseline) push("none", baseline);
      for (const auto& [k, row] : cells) push("x" + std::to_string(k), row);
      if (labels.size() < 2) continue;
      const auto img = render_line_chart(
          spec.name + ": " + detector + " / " + method, labels, {fnr, fpr, auc_s});
      save_png(dir / (sanitize_id(detector) + "__" + sanitize_id(method) + ".png"), img);
    }
  }
}

}  // namespace detail

/// Run the full grid. Cell failures are recorded, not fatal; the CSV holds
/// the successful rows in spec order and the JSON report holds everything,
/// provenance included. Identical spec + inputs give byte-identical reports.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const DatasetManifest manifest = read_manifest(spec.manifest_path);
  const std::filesystem::path out_dir = spec.output_dir;
  std::filesystem::create_directories(out_dir);
  const std::string forgery_tag = detail::manifest_forgery_tag(manifest);

  // Materialize each distinct attack once; detectors share the attacked
  // tree. Configs are keyed by their full JSON — cell_tag alone does not
  // cover margin or detector choice — and tag collisions between different
  // configs get a hash suffix on the directory.
  struct AttackedSet {
    DatasetManifest manifest;
    long failures = 0;
  };
  std::map<std::string, AttackedSet> attacked_sets;
  std::map<std::string, std::string> tag_owners;  // directory tag -> config key
  ExperimentResult result;

  for (const auto& attack : spec.attack_grid) {
    if (!attack) continue;
    const std::string key = attack->to_json().dump();
    if (attacked_sets.count(key)) continue;
    std::string tag = attack->cell_tag();
    const auto owner = tag_owners.find(tag);
    if (owner != tag_owners.end() && owner->second != key) {
      tag += "_" + to_hex(fnv1a64(key)).substr(0, 8);
    }
    tag_owners.emplace(tag, key);
    AttackRunOptions aopt;
    aopt.jobs = spec.jobs;
    aopt.model_root = spec.model_root;
    try {
      auto run = attack_dataset(manifest, *attack, out_dir / "attacks" / tag, aopt);
      AttackedSet set;
      set.failures = run.failed;
      set.manifest = std::move(run.manifest);
      if (spec.emit_similarity) {
        write_similarity_csv(similarity_report(manifest, set.manifest),
                             out_dir / "attacks" / tag / "similarity.csv");
      }
      attacked_sets.emplace(key, std::move(set));
    } catch (const Error&) {
      // Leave the set missing; every cell using it reports the failure.
    }
  }

  for (const auto& detector : spec.detector_ids) {
    for (const auto& attack : spec.attack_grid) {
      ExperimentRow row;
      row.detector_id = detector;
      row.attack = attack;
      row.forgery_method = forgery_tag;
      try {
        const DatasetManifest* to_score = &manifest;
        if (attack) {
          const auto it = attacked_sets.find(attack->to_json().dump());
          if (it == attacked_sets.end()) {
            throw Error("attack stage failed for cell " + attack->cell_tag());
          }
          to_score = &it->second.manifest;
          row.cell.attack_failures = it->second.failures;
        }
        auto scored = score_dataset(*to_score, detector_factory(detector), spec.jobs);
        row.cell.threshold = spec.threshold;
        row.cell.aggregation = spec.aggregation;
        row.cell.scored = static_cast<long>(scored.scores.size());
        row.cell.skipped_no_face = scored.skipped_no_face;
        row.cell.score_failures = static_cast<long>(scored.errors.size());
        if (spec.aggregation == Aggregation::kVideoMajority) {
          const auto samples =
              aggregate_video_majority(scored.scores, *to_score, spec.threshold);
          row.cell.counts = confusion(samples, 0.5);
          row.cell.metrics = compute_metrics(row.cell.counts, auc(samples));
        } else {
          row.cell.counts = confusion(scored.scores, spec.threshold);
          row.cell.metrics = compute_metrics(row.cell.counts, auc(scored.scores));
        }
      } catch (const Error& e) {
        row.failed = true;
        row.error = e.what();
        ++result.failed_cells;
      }
      result.rows.push_back(std::move(row));
    }
  }

  result.csv_path = out_dir / "report.csv";
  detail::write_experiment_csv(result, result.csv_path);

  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : result.rows) rows.push_back(detail::row_json(row));
  const nlohmann::json report{
      {"name", spec.name},
      {"version", kVersion},
      {"spec", spec.to_json()},
      {"spec_hash", to_hex(fnv1a64(spec.to_json().dump()))},
      {"manifest_metadata", manifest.metadata},
      {"class_counts",
       {{"pristine", manifest.count(Label::kPristine)},
        {"fake", manifest.count(Label::kFake)}}},
      {"rows", rows}};
  result.json_path = out_dir / "report.json";
  std::ofstream json_out(result.json_path, std::ios::trunc);
  json_out << report.dump(2) << "\n";

  if (spec.emit_plots) {
    detail::emit_experiment_plots(spec, result, out_dir / "plots");
  }
  return result;
}

}  // namespace srattack
