#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>

#include "rtc/image.hpp"
#include "rtc/rng.hpp"

namespace rtc::test {

inline ImagePlane random_image(int n, std::uint64_t seed, double scale = 255.0) {
  Rng rng(seed);
  ImagePlane img(n, n);
  for (double& v : img.pixels()) v = scale * open_unit(rng);
  return img;
}

/// Smooth random image: a few random sinusoids, so every subband carries energy.
inline ImagePlane smooth_image(int n, std::uint64_t seed) {
  Rng rng(seed);
  ImagePlane img(n, n, 128.0);
  for (int c = 0; c < 6; ++c) {
    const double fx = 6.28318530718 * open_unit(rng) * 0.25;
    const double fy = 6.28318530718 * open_unit(rng) * 0.25;
    const double ph = 6.28318530718 * open_unit(rng);
    const double amp = 20.0 * open_unit(rng);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) img.at(x, y) += amp * std::sin(fx * x + fy * y + ph);
  }
  for (double& v : img.pixels()) v += 10.0 * (open_unit(rng) - 0.5);
  return img;
}

inline double rel_l2(std::span<const double> a, std::span<const double> b) {
  double e = 0.0, r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    e += (a[i] - b[i]) * (a[i] - b[i]);
    r += b[i] * b[i];
  }
  return std::sqrt(e / r);
}

inline std::filesystem::path data_dir() { return RTC_TEST_DATA_DIR; }

inline std::filesystem::path scratch_dir(const char* name) {
  auto p = std::filesystem::temp_directory_path() / ("rtc_test_" + std::string(name));
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace rtc::test
