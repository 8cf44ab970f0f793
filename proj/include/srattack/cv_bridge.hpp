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

// ImageTensor <-> cv::Mat conversions. OpenCV is used for codecs, video
// decode and DNN inference only; pixel math stays on ImageTensor.

#pragma once

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "srattack/errors.hpp"
#include "srattack/image.hpp"

namespace srattack {

/// Copy to a BGR cv::Mat (the channel order OpenCV codecs expect).
inline cv::Mat to_bgr_mat(const ImageTensor& img) {
  img.require_valid("to_bgr_mat");
  cv::Mat rgb(img.height, img.width, CV_8UC3,
              const_cast<std::uint8_t*>(img.pixels.data()));
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  return bgr;
}

/// Zero-copy RGB view over the tensor; valid only while `img` lives.
inline cv::Mat rgb_view(const ImageTensor& img) {
  img.require_valid("rgb_view");
  return cv::Mat(img.height, img.width, CV_8UC3,
                 const_cast<std::uint8_t*>(img.pixels.data()));
}

/// Copy from an 8-bit 3-channel BGR cv::Mat.
inline ImageTensor from_bgr_mat(const cv::Mat& bgr) {
  if (bgr.empty() || bgr.type() != CV_8UC3) {
    throw InvalidArgumentError("from_bgr_mat: expected a non-empty CV_8UC3 matrix");
  }
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  ImageTensor out(rgb.rows, rgb.cols);
  if (rgb.isContinuous()) {
    std::copy_n(rgb.ptr<std::uint8_t>(0), out.pixels.size(), out.pixels.data());
  } else {
    for (int y = 0; y < rgb.rows; ++y) {
      std::copy_n(rgb.ptr<std::uint8_t>(y),
                  static_cast<std::size_t>(rgb.cols) * 3,
                  out.pixels.data() + out.index(y, 0, 0));
    }
  }
  return out;
}

}  // namespace srattack
