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

// The attack: shrink each detected face by 1/K, SR it back up, paste it
// over its source box. The engine sees face detectors and SR backends only;
// no deepfake detector can reach this translation — the attack is black-box
// by construction.

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "srattack/face.hpp"
#include "srattack/io_image.hpp"
#include "srattack/manifest.hpp"
#include "srattack/parallel.hpp"
#include "srattack/registry.hpp"
#include "srattack/sr.hpp"
#include "srattack/util.hpp"
#include "srattack/version.hpp"

namespace srattack {

enum class AttackScope { kBoth, kFakeOnly };

inline const char* attack_scope_name(AttackScope s) {
  return s == AttackScope::kBoth ? "both" : "fake-only";
}

inline AttackScope parse_attack_scope(const std::string& s) {
  if (s == "both") return AttackScope::kBoth;
  if (s == "fake-only" || s == "fake_only") return AttackScope::kFakeOnly;
  throw InvalidArgumentError("unknown attack scope '" + s + "'");
}

struct AttackConfig {
  int scale_k = 2;
  std::string sr_backend_id = "bicubic";
  std::string face_detector_id = "full-frame";
  AttackScope scope = AttackScope::kBoth;
  double face_margin = 0.0;

  void validate() const {
    if (scale_k < 1) throw InvalidArgumentError("attack config: K must be >= 1");
    if (face_margin < 0.0) {
      throw InvalidArgumentError("attack config: face margin must be >= 0");
    }
    if (sr_backend_id.empty() || face_detector_id.empty()) {
      throw InvalidArgumentError("attack config: backend ids must be non-empty");
    }
  }

  nlohmann::json to_json() const {
    return {{"scale_k", scale_k},
            {"sr_backend", sr_backend_id},
            {"face_detector", face_detector_id},
            {"scope", attack_scope_name(scope)},
            {"face_margin", face_margin}};
  }

  static AttackConfig from_json(const nlohmann::json& j) {
    AttackConfig c;
    c.scale_k = j.value("scale_k", c.scale_k);
    c.sr_backend_id = j.value("sr_backend", c.sr_backend_id);
    c.face_detector_id = j.value("face_detector", c.face_detector_id);
    if (j.contains("scope")) c.scope = parse_attack_scope(j["scope"].get<std::string>());
    c.face_margin = j.value("face_margin", c.face_margin);
    c.validate();
    return c;
  }

  std::string cell_tag() const {
    return sr_backend_id + "_x" + std::to_string(scale_k) + "_" +
           attack_scope_name(scope);
  }
};

struct AttackOutcome {
  ImageTensor frame;
  int faces_attacked = 0;
  bool skipped_no_face = false;
  std::vector<BoundingBox> boxes;  // regions actually rewritten
};

/// Attack one frame. Every detected face is processed independently,
/// highest confidence first; pixels outside the attacked boxes are bitwise
/// untouched. Faces smaller than K pixels in either direction cannot be
/// shrunk by 1/K and are left alone.
inline AttackOutcome attack_frame(const ImageTensor& frame, const AttackConfig& config,
                                  FaceDetector& detector, SRBackend& backend) {
  config.validate();
  frame.require_valid("attack_frame");
  const auto detections = detect_faces(frame, detector);
  if (detections.empty()) {
    return AttackOutcome{frame, 0, true, {}};
  }
  AttackOutcome out{frame, 0, false, {}};
  for (const auto& detected : detections) {
    const auto boxed = clamp_box(expand_box(detected, config.face_margin),
                                 frame.width, frame.height);
    if (!boxed) continue;
    if (boxed->h < config.scale_k || boxed->w < config.scale_k) continue;
    const FaceCrop face = crop(out.frame, *boxed);
    FaceCrop attacked{sr_roundtrip(face.image, config.scale_k, backend), *boxed, {}};
    out.frame = paste(out.frame, attacked);
    out.boxes.push_back(*boxed);
    ++out.faces_attacked;
  }
  return out;
}

struct AttackRunOptions {
  int jobs = 0;  // 0 -> hardware concurrency
  double max_failure_fraction = 0.25;
  std::string model_root;
};

struct AttackEntryRecord {
  std::string entry_id;
  int faces_attacked = 0;
  bool skipped_no_face = false;
  bool copied_through = false;
  std::string error;  // empty on success
};

struct AttackRunResult {
  DatasetManifest manifest;
  std::vector<AttackEntryRecord> records;
  long attacked = 0;
  long copied = 0;
  long skipped_no_face = 0;
  long failed = 0;
  bool detector_overridden = false;  // manifest held pre-cropped faces

  nlohmann::json run_json(const AttackConfig& config) const {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& r : records) {
      nlohmann::json e{{"entry_id", r.entry_id},
                       {"faces_attacked", r.faces_attacked},
                       {"skipped_no_face", r.skipped_no_face},
                       {"copied_through", r.copied_through}};
      if (!r.error.empty()) e["error"] = r.error;
      entries.push_back(std::move(e));
    }
    return {{"version", kVersion},
            {"config", config.to_json()},
            {"config_hash", to_hex(fnv1a64(config.to_json().dump()))},
            {"dnn_io", "rgb-unit-float-nchw"},
            {"detector_overridden_full_frame", detector_overridden},
            {"totals",
             {{"attacked", attacked},
              {"copied", copied},
              {"skipped_no_face", skipped_no_face},
              {"failed", failed}}},
            {"entries", std::move(entries)}};
  }
};

/// Attack a whole manifest into out_dir.
///
/// Attacked frames are written as PNG (the attack, not codec loss, must be
/// the only perturbation); pristine entries under fake-only scope and
/// no-face frames are copied through byte-identical. Unreadable entries are
/// recorded and the run continues, up to max_failure_fraction; backend
/// failures abort. Writes manifest.jsonl and attack_run.json.
inline AttackRunResult attack_dataset(const DatasetManifest& input,
                                      const AttackConfig& config,
                                      const std::filesystem::path& out_dir,
                                      const AttackRunOptions& options = {}) {
  config.validate();
  input.validate();
  std::filesystem::create_directories(out_dir / "entries");

  // Manifests of pre-cropped faces need no detection: the face is the image.
  const bool face_crops = input.metadata.value("content", "frames") == "face_crops";
  const std::string detector_id =
      face_crops ? "full-frame" : config.face_detector_id;

  // Resolve both ports once up front so a broken backend aborts before any
  // output is written, then once per worker for thread isolation.
  make_face_detector(detector_id);
  make_sr_backend(config.sr_backend_id, options.model_root);

  const int jobs = options.jobs > 0 ? options.jobs : default_jobs();
  const std::size_t n = input.entries.size();
  std::vector<ManifestEntry> out_entries(n);
  std::vector<AttackEntryRecord> records(n);

  // Unique ids can still collide after filesystem sanitization ("a/b" vs
  // "a_b"); disambiguate deterministically before the parallel loop.
  std::vector<std::string> stems(n);
  {
    std::unordered_set<std::string> used;
    for (std::size_t i = 0; i < n; ++i) {
      std::string stem = sanitize_id(input.entries[i].entry_id);
      while (!used.insert(stem).second) stem += "_" + std::to_string(i);
      stems[i] = std::move(stem);
    }
  }

  struct WorkerPorts {
    std::unique_ptr<FaceDetector> detector;
    std::unique_ptr<SRBackend> backend;
  };
  std::vector<WorkerPorts> ports(static_cast<std::size_t>(std::max(1, jobs)));

  parallel_for(n, jobs, [&](std::size_t i, int worker) {
    const ManifestEntry& entry = input.entries[i];
    auto& port = ports[static_cast<std::size_t>(worker)];
    if (!port.detector) {
      port.detector = make_face_detector(detector_id);
      port.backend = make_sr_backend(config.sr_backend_id, options.model_root);
    }

    ManifestEntry out = entry;
    AttackEntryRecord rec;
    rec.entry_id = entry.entry_id;
    const std::string& safe_id = stems[i];
    const auto src = std::filesystem::path(entry.path);

    try {
      const bool in_scope =
          config.scope == AttackScope::kBoth || entry.label == Label::kFake;
      if (!in_scope) {
        const auto dst = out_dir / "entries" / (safe_id + src.extension().string());
        write_file_bytes(dst, read_file_bytes(src));
        out.path = dst.string();
        rec.copied_through = true;
      } else {
        const ImageTensor frame = load_image(src);
        const AttackOutcome outcome =
            attack_frame(frame, config, *port.detector, *port.backend);
        if (outcome.skipped_no_face) {
          const auto dst = out_dir / "entries" / (safe_id + src.extension().string());
          write_file_bytes(dst, read_file_bytes(src));
          out.path = dst.string();
          out.skipped_no_face = true;
          rec.skipped_no_face = true;
        } else {
          const auto dst = out_dir / "entries" / (safe_id + ".png");
          save_png(dst, outcome.frame);
          out.path = dst.string();
          out.boxes = outcome.boxes;
          rec.faces_attacked = outcome.faces_attacked;
        }
      }
    } catch (const BackendUnavailableError&) {
      throw;  // systemic: abort the run
    } catch (const Error& e) {
      rec.error = e.what();
    }
    out_entries[i] = std::move(out);
    records[i] = std::move(rec);
  });

  AttackRunResult result;
  result.detector_overridden = face_crops && config.face_detector_id != "full-frame";
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = records[i];
    if (!rec.error.empty()) {
      ++result.failed;
      continue;  // failed entries are dropped from the output manifest
    }
    if (rec.copied_through) ++result.copied;
    else if (rec.skipped_no_face) ++result.skipped_no_face;
    else ++result.attacked;
    result.manifest.entries.push_back(std::move(out_entries[i]));
  }
  result.records = std::move(records);

  result.manifest.metadata = input.metadata;
  result.manifest.metadata["attack"] = config.to_json();
  result.manifest.metadata["attack_config_hash"] = to_hex(fnv1a64(config.to_json().dump()));
  result.manifest.metadata["version"] = kVersion;

  write_manifest(result.manifest, out_dir / "manifest.jsonl");
  std::ofstream run(out_dir / "attack_run.json", std::ios::trunc);
  run << result.run_json(config).dump(2) << "\n";

  if (n > 0 &&
      static_cast<double>(result.failed) / static_cast<double>(n) >
          options.max_failure_fraction) {
    throw Error("attack_dataset: " + std::to_string(result.failed) + "/" +
                std::to_string(n) + " entries failed (limit " +
                std::to_string(options.max_failure_fraction) + ")");
  }
  return result;
}

}  // namespace srattack
