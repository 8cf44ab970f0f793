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

#include <cmath>
#include <limits>

#include "srattack/artifacts.hpp"
#include "srattack/quality.hpp"
#include "srattack/resample.hpp"
#include "test_images.hpp"

using namespace srattack;
using srattack::testing::add_checkerboard;
using srattack::testing::constant_image;
using srattack::testing::random_image;
using srattack::testing::smooth_image;

TEST_CASE("quantize rounds half away from zero and clamps", "[imaging]") {
  CHECK(quantize_u8(2.5) == 3);
  CHECK(quantize_u8(3.5) == 4);
  CHECK(quantize_u8(2.4999) == 2);
  CHECK(quantize_u8(-0.4) == 0);
  CHECK(quantize_u8(-7.0) == 0);
  CHECK(quantize_u8(254.5) == 255);
  CHECK(quantize_u8(300.0) == 255);
}

TEST_CASE("resize size contract and errors", "[imaging][resize]") {
  const auto img = random_image(1, 128, 128);
  const auto out = resize(img, 64, 64, Filter::kBicubic);
  CHECK(out.height == 64);
  CHECK(out.width == 64);

  CHECK_THROWS_AS(resize(img, 0, 64, Filter::kBicubic), InvalidArgumentError);
  CHECK_THROWS_AS(resize(img, 64, -3, Filter::kNearest), InvalidArgumentError);
}

TEST_CASE("resize of a constant image is that constant, any filter any dims",
          "[imaging][resize]") {
  for (const std::uint8_t v : {0, 1, 77, 200, 255}) {
    const auto img = constant_image(13, 9, v);
    for (const auto f : {Filter::kNearest, Filter::kBilinear, Filter::kBicubic}) {
      for (const auto [oh, ow] : {std::pair{1, 1}, {5, 31}, {13, 9}, {40, 3}, {26, 18}}) {
        const auto out = resize(img, oh, ow, f);
        CHECK(out == constant_image(oh, ow, v));
      }
    }
  }
}

TEST_CASE("same-size nearest resize is the bitwise identity", "[imaging][resize]") {
  ImageTensor img(2, 2);
  // [[0,0],[255,255]] replicated across channels
  for (int c = 0; c < 3; ++c) {
    img.at(0, 0, c) = 0;
    img.at(0, 1, c) = 0;
    img.at(1, 0, c) = 255;
    img.at(1, 1, c) = 255;
  }
  CHECK(resize(img, 2, 2, Filter::kNearest) == img);

  const auto big = random_image(2, 57, 41);
  CHECK(resize(big, 57, 41, Filter::kNearest) == big);
}

TEST_CASE("resize rounding is half away from zero", "[imaging][resize]") {
  // Two-pixel row averaging to x.5 must round up.
  ImageTensor img(1, 2);
  for (int c = 0; c < 3; ++c) {
    img.at(0, 0, c) = 10;
    img.at(0, 1, c) = 11;
  }
  const auto out = resize(img, 1, 1, Filter::kBilinear);
  CHECK(out.at(0, 0, 0) == 11);
}

TEST_CASE("downscale size arithmetic", "[imaging][downscale]") {
  CHECK(downscale(random_image(3, 128, 128), 2).height == 64);
  CHECK(downscale(random_image(3, 128, 128), 2).width == 64);

  const auto odd = downscale(random_image(4, 130, 129), 4);
  CHECK(odd.height == 32);
  CHECK(odd.width == 32);
}

TEST_CASE("downscale K=1 is the bitwise identity", "[imaging][downscale]") {
  const auto img = random_image(5, 33, 47);
  CHECK(downscale(img, 1) == img);
}

TEST_CASE("downscale rejects K larger than a dimension", "[imaging][downscale]") {
  const auto img = random_image(6, 8, 20);
  CHECK_THROWS_AS(downscale(img, 9), DegenerateScaleError);
  CHECK_THROWS_AS(downscale(random_image(6, 20, 8), 9), DegenerateScaleError);
  CHECK_THROWS_AS(downscale(img, 0), InvalidArgumentError);
}

TEST_CASE("mse basics", "[imaging][metric]") {
  const auto x = random_image(7, 24, 24);
  CHECK(mse(x, x) == 0.0);
  CHECK(mse(constant_image(16, 16, 0), constant_image(16, 16, 255)) == 65025.0);
  CHECK(mse(constant_image(16, 16, 100), constant_image(16, 16, 116)) == 256.0);

  CHECK_THROWS_AS(mse(random_image(8, 4, 4), random_image(8, 4, 5)), InvalidArgumentError);
}

TEST_CASE("psnr values and infinity sentinel", "[imaging][metric]") {
  const auto x = random_image(9, 24, 24);
  CHECK(std::isinf(psnr(x, x)));
  CHECK(psnr(constant_image(8, 8, 0), constant_image(8, 8, 255)) == Catch::Approx(0.0).margin(1e-12));
  // 20*log10(255/16), checked against a hand calculation.
  CHECK(psnr(constant_image(8, 8, 100), constant_image(8, 8, 116)) ==
        Catch::Approx(24.048).margin(0.01));
}

TEST_CASE("ssim self-similarity and closed form on constants", "[imaging][metric]") {
  const auto x = smooth_image(10, 32, 32);
  CHECK(ssim(x, x) == Catch::Approx(1.0).margin(1e-9));

  // Constant images: variances vanish, so only the luminance factor remains.
  constexpr double kC1 = 6.5025;
  const double expected = kC1 / (255.0 * 255.0 + kC1);
  CHECK(ssim(constant_image(16, 16, 0), constant_image(16, 16, 255)) ==
        Catch::Approx(expected).margin(1e-6));

  const double c1 = 37.0, c2 = 180.0;
  const double general = (2.0 * c1 * c2 + kC1) / (c1 * c1 + c2 * c2 + kC1);
  CHECK(ssim(constant_image(16, 16, 37), constant_image(16, 16, 180)) ==
        Catch::Approx(general).margin(1e-6));

  CHECK_THROWS_AS(ssim(random_image(1, 10, 32), random_image(1, 10, 32)),
                  InvalidArgumentError);
  CHECK_THROWS_AS(ssim(random_image(1, 32, 32), random_image(2, 32, 16)),
                  InvalidArgumentError);
}

TEST_CASE("metric symmetry", "[imaging][metric][property]") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const auto a = smooth_image(seed, 24, 24);
    const auto b = smooth_image(seed + 1000, 24, 24);
    CHECK(mse(a, b) == mse(b, a));
    CHECK(psnr(a, b) == psnr(b, a));
    CHECK(ssim(a, b) == Catch::Approx(ssim(b, a)).margin(1e-12));
  }
}

TEST_CASE("metrics are pure: identical inputs give identical outputs",
          "[imaging][metric][property]") {
  const auto a = smooth_image(42, 24, 24);
  const auto b = smooth_image(43, 24, 24);
  CHECK(ssim(a, b) == ssim(a, b));
  CHECK(psnr(a, b) == psnr(a, b));
}

TEST_CASE("bicubic round-trip degrades more at K=4 than K=2", "[imaging][property]") {
  // Table-2-style ordering, checked on a 100-image smooth corpus.
  int ok = 0;
  const int n = 100;
  for (int i = 0; i < n; ++i) {
    const auto x = smooth_image(2000 + i, 64, 64);
    const auto r2 = resize(downscale(x, 2), 64, 64, Filter::kBicubic);
    const auto r4 = resize(downscale(x, 4), 64, 64, Filter::kBicubic);
    if (ssim(x, r4) <= ssim(x, r2)) ++ok;
  }
  CHECK(ok >= 95);
}

TEST_CASE("mean_abs_laplacian hand cases", "[imaging][laplacian]") {
  // Single bump: |4*10 - 4*20| = 40 at the only interior pixel.
  ImageTensor img(3, 3, 10);
  for (int c = 0; c < 3; ++c) img.at(1, 1, c) = 20;
  CHECK(mean_abs_laplacian(img) == Catch::Approx(40.0));

  // Checkerboard of amplitude A has |lap| = 8A away from the pattern edge.
  ImageTensor cb(16, 16, 128);
  add_checkerboard(cb, 0, 0, 16, 16, 10);
  const double e = mean_abs_laplacian(cb, Region{2, 2, 12, 12});
  CHECK(e == Catch::Approx(80.0));

  // Smooth content carries far less energy than the checkerboard.
  CHECK(mean_abs_laplacian(smooth_image(11, 16, 16)) < 25.0);

  // No pixel with a full neighbourhood -> 0.
  CHECK(mean_abs_laplacian(ImageTensor(1, 2, 9)) == 0.0);
}
