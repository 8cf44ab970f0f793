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

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "srattack/errors.hpp"
#include "srattack/face.hpp"
#include "srattack/label.hpp"

namespace srattack {

/// Reserved forgery_method tag for pristine entries.
inline constexpr const char* kNoForgery = "none";

struct ManifestEntry {
  std::string entry_id;
  std::string path;
  Label label = Label::kPristine;
  std::string forgery_method = kNoForgery;
  std::optional<std::string> source_video;
  std::optional<long> frame_index;

  // Set by attack_dataset on its output manifests.
  bool skipped_no_face = false;
  std::vector<BoundingBox> boxes;
};

/// Line-delimited manifest: an optional leading {"meta": ...} record, then
/// one JSON entry per line.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  nlohmann::json metadata = nlohmann::json::object();

  long count(Label l) const {
    long n = 0;
    for (const auto& e : entries) n += e.label == l;
    return n;
  }

  /// Unique ids, distinct paths, pristine => forgery tag "none".
  void validate() const {
    std::unordered_set<std::string> ids, paths;
    for (const auto& e : entries) {
      if (e.entry_id.empty()) throw InvalidArgumentError("manifest: empty entry_id");
      if (!ids.insert(e.entry_id).second) {
        throw InvalidArgumentError("manifest: duplicate entry_id '" + e.entry_id + "'");
      }
      if (!paths.insert(e.path).second) {
        throw InvalidArgumentError("manifest: duplicate path '" + e.path + "'");
      }
      if (e.label == Label::kPristine && e.forgery_method != kNoForgery) {
        throw InvalidArgumentError("manifest: pristine entry '" + e.entry_id +
                                   "' tagged with forgery method '" +
                                   e.forgery_method + "'");
      }
    }
  }
};

namespace detail {

inline nlohmann::json entry_to_json(const ManifestEntry& e) {
  nlohmann::json j{{"entry_id", e.entry_id},
                   {"path", e.path},
                   {"label", label_name(e.label)},
                   {"forgery_method", e.forgery_method}};
  if (e.source_video) j["source_video"] = *e.source_video;
  if (e.frame_index) j["frame_index"] = *e.frame_index;
  if (e.skipped_no_face) j["skipped_no_face"] = true;
  if (!e.boxes.empty()) {
    auto arr = nlohmann::json::array();
    for (const auto& b : e.boxes) arr.push_back({b.x, b.y, b.w, b.h});
    j["boxes"] = arr;
  }
  return j;
}

inline ManifestEntry entry_from_json(const nlohmann::json& j) {
  ManifestEntry e;
  e.entry_id = j.at("entry_id").get<std::string>();
  e.path = j.at("path").get<std::string>();
  e.label = parse_label(j.at("label").get<std::string>());
  e.forgery_method = j.at("forgery_method").get<std::string>();
  if (j.contains("source_video")) e.source_video = j["source_video"].get<std::string>();
  if (j.contains("frame_index")) e.frame_index = j["frame_index"].get<long>();
  if (j.contains("skipped_no_face")) e.skipped_no_face = j["skipped_no_face"].get<bool>();
  if (j.contains("boxes")) {
    for (const auto& b : j["boxes"]) {
      e.boxes.push_back(BoundingBox{b.at(0).get<int>(), b.at(1).get<int>(),
                                    b.at(2).get<int>(), b.at(3).get<int>(), 1.0});
    }
  }
  return e;
}

}  // namespace detail

inline void write_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  m.validate();
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IngestionError("write_manifest: cannot open " + path.string());
  if (!m.metadata.empty()) {
    out << nlohmann::json{{"meta", m.metadata}}.dump() << "\n";
  }
  for (const auto& e : m.entries) out << detail::entry_to_json(e).dump() << "\n";
  if (!out) throw IngestionError("write_manifest: short write to " + path.string());
}

inline DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("read_manifest: cannot open " + path.string());
  DatasetManifest m;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IngestionError("read_manifest: " + path.string() + ":" +
                           std::to_string(line_no) + ": " + e.what());
    }
    if (j.contains("meta")) {
      m.metadata = j["meta"];
      continue;
    }
    try {
      m.entries.push_back(detail::entry_from_json(j));
    } catch (const nlohmann::json::exception& e) {
      throw IngestionError("read_manifest: " + path.string() + ":" +
                           std::to_string(line_no) + ": " + e.what());
    }
  }
  m.validate();
  return m;
}

struct BalanceReport {
  long pristine_count = 0;
  long fake_count = 0;
  bool balanced = false;
  bool empty_warning = false;
};

inline BalanceReport balance_check(const DatasetManifest& m) {
  BalanceReport r;
  r.pristine_count = m.count(Label::kPristine);
  r.fake_count = m.count(Label::kFake);
  r.balanced = r.pristine_count == r.fake_count;
  r.empty_warning = m.entries.empty();
  return r;
}

}  // namespace srattack
