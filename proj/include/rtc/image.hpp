#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace rtc {

/// Grayscale image in 64-bit floating point, row-major.
class ImagePlane {
 public:
  ImagePlane() = default;
  ImagePlane(int width, int height, double fill = 0.0);
  ImagePlane(int width, int height, std::vector<double> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  std::span<double> pixels() noexcept { return data_; }
  std::span<const double> pixels() const noexcept { return data_; }

  /// Rounded and clamped to [0, 255]; the only place pixel values are clipped.
  std::vector<std::uint8_t> to_8bit() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Reads a binary (P5) PGM with maxval <= 255.
ImagePlane read_pgm(const std::filesystem::path& path);

/// Writes a binary (P5) PGM through a temporary file and rename.
void write_pgm(const std::filesystem::path& path, const ImagePlane& image);

/// Writes bytes atomically (temp + rename).
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace rtc
