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

// Minimal deterministic line charts for the sweep reports. Rendering uses
// OpenCV drawing primitives; values are percentages in [0, 100].

#pragma once

#include <string>
#include <vector>

#include <opencv2/imgproc.hpp>

#include "srattack/cv_bridge.hpp"
#include "srattack/errors.hpp"
#include "srattack/image.hpp"

namespace srattack {

struct PlotSeries {
  std::string name;
  std::vector<double> values;  // one per x label, NaN to skip
};

inline ImageTensor render_line_chart(const std::string& title,
                                     const std::vector<std::string>& x_labels,
                                     const std::vector<PlotSeries>& series,
                                     int width = 640, int height = 480) {
  if (x_labels.empty() || series.empty()) {
    throw InvalidArgumentError("render_line_chart: nothing to plot");
  }
  cv::Mat canvas(height, width, CV_8UC3, cv::Scalar(255, 255, 255));
  const int left = 70, right = width - 20, top = 50, bottom = height - 60;
  const cv::Scalar axis(40, 40, 40);
  const std::vector<cv::Scalar> palette{
      {180, 60, 30}, {30, 120, 200}, {40, 160, 60}, {150, 40, 160}, {20, 20, 20}};

  cv::putText(canvas, title, {left, 30}, cv::FONT_HERSHEY_SIMPLEX, 0.6, axis, 1,
              cv::LINE_AA);
  cv::line(canvas, {left, top}, {left, bottom}, axis, 1, cv::LINE_AA);
  cv::line(canvas, {left, bottom}, {right, bottom}, axis, 1, cv::LINE_AA);

  const auto y_of = [&](double pct) {
    return bottom - static_cast<int>((pct / 100.0) * (bottom - top));
  };
  for (int tick = 0; tick <= 100; tick += 25) {
    const int y = y_of(tick);
    cv::line(canvas, {left - 4, y}, {left, y}, axis, 1, cv::LINE_AA);
    cv::putText(canvas, std::to_string(tick), {left - 45, y + 4},
                cv::FONT_HERSHEY_SIMPLEX, 0.4, axis, 1, cv::LINE_AA);
  }
  const int n = static_cast<int>(x_labels.size());
  const auto x_of = [&](int i) {
    return n == 1 ? (left + right) / 2
                  : left + static_cast<int>((right - left) * (static_cast<double>(i) / (n - 1)));
  };
  for (int i = 0; i < n; ++i) {
    cv::putText(canvas, x_labels[i], {x_of(i) - 12, bottom + 20},
                cv::FONT_HERSHEY_SIMPLEX, 0.45, axis, 1, cv::LINE_AA);
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& color = palette[s % palette.size()];
    const auto& v = series[s].values;
    for (int i = 0; i + 1 < n && i + 1 < static_cast<int>(v.size()); ++i) {
      if (std::isnan(v[i]) || std::isnan(v[i + 1])) continue;
      cv::line(canvas, {x_of(i), y_of(v[i])}, {x_of(i + 1), y_of(v[i + 1])}, color, 2,
               cv::LINE_AA);
    }
    for (int i = 0; i < n && i < static_cast<int>(v.size()); ++i) {
      if (std::isnan(v[i])) continue;
      cv::circle(canvas, {x_of(i), y_of(v[i])}, 3, color, cv::FILLED, cv::LINE_AA);
    }
    const int ly = top + 18 * static_cast<int>(s);
    cv::line(canvas, {right - 110, ly}, {right - 90, ly}, color, 2, cv::LINE_AA);
    cv::putText(canvas, series[s].name, {right - 84, ly + 4}, cv::FONT_HERSHEY_SIMPLEX,
                0.45, axis, 1, cv::LINE_AA);
  }
  return from_bgr_mat(canvas);
}

}  // namespace srattack
