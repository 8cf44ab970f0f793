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
#include <string>
#include <vector>

#include <opencv2/imgcodecs.hpp>

#include "srattack/cv_bridge.hpp"
#include "srattack/errors.hpp"
#include "srattack/image.hpp"
#include "srattack/util.hpp"

namespace srattack {

/// Load a PNG or JPEG as 8-bit RGB. Anything that is not 8-bit 3-channel is
/// rejected with an IngestionError: the pipeline's bitwise contracts only
/// make sense on one pixel format.
inline ImageTensor load_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw IngestionError("load_image: no such file: " + path.string());
  }
  cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (raw.empty()) {
    throw IngestionError("load_image: cannot decode " + path.string());
  }
  if (raw.depth() != CV_8U) {
    throw IngestionError("load_image: " + path.string() + " is not 8-bit");
  }
  if (raw.channels() != 3) {
    throw IngestionError("load_image: " + path.string() + " has " +
                         std::to_string(raw.channels()) + " channels, expected 3");
  }
  return from_bgr_mat(raw);
}

/// Lossless save; the only write format the pipeline uses.
inline void save_png(const std::filesystem::path& path, const ImageTensor& img) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (!cv::imwrite(path.string(), to_bgr_mat(img))) {
    throw IngestionError("save_png: cannot write " + path.string());
  }
}

/// In-memory JPEG round-trip at the given quality; used by the compression
/// augmentation op.
inline ImageTensor jpeg_roundtrip(const ImageTensor& img, int quality) {
  std::vector<unsigned char> buf;
  const std::vector<int> params{cv::IMWRITE_JPEG_QUALITY, quality};
  if (!cv::imencode(".jpg", to_bgr_mat(img), buf, params)) {
    throw IngestionError("jpeg_roundtrip: encode failed");
  }
  cv::Mat decoded = cv::imdecode(buf, cv::IMREAD_COLOR);
  if (decoded.empty()) {
    throw IngestionError("jpeg_roundtrip: decode failed");
  }
  return from_bgr_mat(decoded);
}

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

inline void write_file_bytes(const std::filesystem::path& path,
                             const std::vector<std::uint8_t>& bytes) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IngestionError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IngestionError("short write to " + path.string());
}

inline std::uint64_t file_hash(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return fnv1a64(bytes.data(), bytes.size());
}

}  // namespace srattack
