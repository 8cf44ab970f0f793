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

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "srattack/errors.hpp"
#include "srattack/image.hpp"

namespace srattack {

/// Perceptual similarity between a pre-attack and post-attack image.
/// psnr_db is +infinity exactly when the images are pixel-identical.
struct SimilarityReport {
  double ssim = 0.0;
  double psnr_db = 0.0;
};

namespace detail {

inline void require_same_size(const ImageTensor& a, const ImageTensor& b,
                              const char* who) {
  a.require_valid(who);
  b.require_valid(who);
  if (!a.same_size(b)) {
    throw InvalidArgumentError(std::string(who) + ": dimension mismatch " +
                               std::to_string(a.height) + "x" + std::to_string(a.width) +
                               " vs " + std::to_string(b.height) + "x" +
                               std::to_string(b.width));
  }
}

// 11-tap Gaussian, sigma 1.5, normalized to sum 1.
inline const std::array<double, 11>& ssim_window() {
  static const std::array<double, 11> w = [] {
    std::array<double, 11> g{};
    double sum = 0.0;
    for (int i = 0; i < 11; ++i) {
      const double d = i - 5;
      g[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
      sum += g[i];
    }
    for (double& v : g) v /= sum;
    return g;
  }();
  return w;
}

// Valid-mode separable Gaussian: horizontal then vertical, no padding.
// Input is h x w, output (h-10) x (w-10).
inline std::vector<double> gauss_valid(const std::vector<double>& plane, int h, int w) {
  const auto& g = ssim_window();
  const int ow = w - 10;
  const int oh = h - 10;
  std::vector<double> mid(static_cast<std::size_t>(h) * ow);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 11; ++k) acc += g[k] * plane[static_cast<std::size_t>(y) * w + x + k];
      mid[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 11; ++k) acc += g[k] * mid[static_cast<std::size_t>(y + k) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace detail

/// Mean squared intensity difference over all pixels and channels.
inline double mse(const ImageTensor& a, const ImageTensor& b) {
  detail::require_same_size(a, b, "mse");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(a.pixels.size());
}

/// Peak signal-to-noise ratio in dB against an 8-bit peak of 255.
/// Returns +infinity when the images are identical (mse == 0).
inline double psnr(const ImageTensor& a, const ImageTensor& b) {
  const double e = mse(a, b);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / e);
}

/// Mean local structural similarity.
///
/// 11x11 Gaussian window (sigma 1.5), C1 = (0.01*255)^2, C2 = (0.03*255)^2,
/// valid window positions only, computed per RGB channel and averaged.
inline double ssim(const ImageTensor& a, const ImageTensor& b) {
  detail::require_same_size(a, b, "ssim");
  if (a.height < 11 || a.width < 11) {
    throw InvalidArgumentError("ssim: images must be at least 11x11, got " +
                               std::to_string(a.height) + "x" + std::to_string(a.width));
  }
  constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
  constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);
  const int h = a.height, w = a.width;
  const std::size_t n = static_cast<std::size_t>(h) * w;

  double channel_sum = 0.0;
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (int c = 0; c < ImageTensor::kChannels; ++c) {
    for (int yy_ = 0; yy_ < h; ++yy_) {
      for (int xx_ = 0; xx_ < w; ++xx_) {
        const std::size_t i = static_cast<std::size_t>(yy_) * w + xx_;
        const double va = a.at(yy_, xx_, c);
        const double vb = b.at(yy_, xx_, c);
        x[i] = va;
        y[i] = vb;
        xx[i] = va * va;
        yy[i] = vb * vb;
        xy[i] = va * vb;
      }
    }
    const auto mu_x = detail::gauss_valid(x, h, w);
    const auto mu_y = detail::gauss_valid(y, h, w);
    const auto m_xx = detail::gauss_valid(xx, h, w);
    const auto m_yy = detail::gauss_valid(yy, h, w);
    const auto m_xy = detail::gauss_valid(xy, h, w);

    double acc = 0.0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
      const double mx = mu_x[i], my = mu_y[i];
      const double vx = m_xx[i] - mx * mx;
      const double vy = m_yy[i] - my * my;
      const double cov = m_xy[i] - mx * my;
      const double num = (2.0 * mx * my + kC1) * (2.0 * cov + kC2);
      const double den = (mx * mx + my * my + kC1) * (vx + vy + kC2);
      acc += num / den;
    }
    channel_sum += acc / static_cast<double>(mu_x.size());
  }
  return channel_sum / ImageTensor::kChannels;
}

inline SimilarityReport similarity(const ImageTensor& a, const ImageTensor& b) {
  return SimilarityReport{ssim(a, b), psnr(a, b)};
}

}  // namespace srattack
