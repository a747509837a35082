#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "rtc/dog_transform.hpp"
#include "rtc/ganglionic.hpp"
#include "rtc/image.hpp"

namespace rtc {

/// Rate in bits per pixel: sum over subbands of 4^k / N^2 times the
/// zeroth-order entropy of that subband's spike counts. Subband 0 holds one
/// neuron and contributes nothing; sign bits are not counted.
double entropy_bpp(const SpikeStream& stream, std::uint32_t t_obs_us);

/// Same measure from per-neuron counts in (k,i,j) order.
double entropy_bpp(std::span<const std::uint32_t> counts, int n, int subbands);

/// Returned by psnr for identical images.
inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

/// 10 log10(255^2 / MSE).
double psnr(const ImagePlane& reference, const ImagePlane& test);

/// Mean SSIM with an 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03,
/// L = 255, averaged over every window position fully inside the image.
double mean_ssim(const ImagePlane& reference, const ImagePlane& test);

/// Rounded and clamped copy, as exported to PGM.
ImagePlane as_8bit(const ImagePlane& image);

/// original - decoded, coefficient by coefficient.
SubbandPyramid coeff_error(const SubbandPyramid& original, const SubbandPyramid& decoded);

/// Subband k as a 2^k x 2^k field (x = j, y = i).
ImagePlane band_field(const SubbandPyramid& pyramid, int k);

/// Pearson correlation of a(y, x) with b(y + dy, x + dx) over their overlap,
/// for |dx|, |dy| <= max_lag. Lags where either overlap has zero variance
/// hold NaN.
class CorrelationMap {
 public:
  CorrelationMap(int max_lag, std::vector<double> values) : max_lag_(max_lag), values_(std::move(values)) {}

  int max_lag() const noexcept { return max_lag_; }
  double at(int dy, int dx) const {
    return values_[static_cast<std::size_t>((dy + max_lag_) * (2 * max_lag_ + 1) + dx + max_lag_)];
  }
  const std::vector<double>& values() const noexcept { return values_; }
  /// Largest |rho| over the defined lags; NaN when none is defined.
  double max_abs() const;

 private:
  int max_lag_ = 0;
  std::vector<double> values_;
};

CorrelationMap cross_correlation_map(const ImagePlane& a, const ImagePlane& b, int max_lag);

struct ErrorSpectrum {
  ImagePlane amplitude;  // |DFT|, DC at (0, 0)
  double flatness = 0.0; // geometric / arithmetic mean of the power, DC excluded
};

/// Throws ConfigError for non-square fields smaller than 8 and NumericalError
/// for an all-zero field.
ErrorSpectrum error_spectrum(const ImagePlane& field);

}  // namespace rtc
