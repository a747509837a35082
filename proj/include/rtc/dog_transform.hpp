#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rtc/image.hpp"
#include "rtc/params.hpp"

namespace rtc {

/// Maps an unbounded integer index onto [0, n) by half-sample symmetric
/// (mirror) extension: ... 1 0 | 0 1 ... n-1 | n-1 n-2 ...
inline int mirror_index(long long m, int n) {
  const long long period = 2LL * n;
  long long r = m % period;
  if (r < 0) r += period;
  return static_cast<int>(r < n ? r : period - 1 - r);
}

/// One-dimensional Gaussian sampled around each lattice center and folded
/// onto [0, n) by the mirror rule. Row s holds the weights of sample s over
/// the contiguous input range [lo[s], lo[s] + weights[s].size()).
struct FoldedKernel {
  std::vector<int> lo;
  std::vector<std::vector<double>> weights;
};

/// Geometry of one subband of the dyadic grid.
struct BandGeometry {
  int k = 0;
  int side = 1;     // 2^k samples per axis
  int stride = 1;   // N / 2^k pixels between samples
  double sigma_c = 0.0;  // center std-dev (px); 0 for the low-pass band
  double sigma_s = 0.0;  // surround std-dev (px); scaling-function sigma for k = 0
  double radius = 0.0;   // tap support |x - center| <= radius

  bool is_lowpass() const { return k == 0; }
  /// Sample center along one axis: i * stride + (stride - 1) / 2.
  double center(int i) const { return i * stride + 0.5 * (stride - 1); }
};

/// Dyadic difference-of-Gaussians bank plus the Gaussian low-pass scaling
/// function at k = 0. Immutable after construction.
class DoGBank {
 public:
  /// N must be a power of two >= 8. K = log2(N) + 1 subbands.
  DoGBank(int n, const RetinaParams& params);

  int n() const noexcept { return n_; }
  int subbands() const noexcept { return static_cast<int>(bands_.size()); }
  double gain() const noexcept { return gain_; }
  const BandGeometry& band(int k) const { return bands_.at(static_cast<std::size_t>(k)); }

  /// Returns a copy using pixel-to-current gain `gamma` (A per intensity unit).
  DoGBank with_gain(double gamma) const;

  /// Center (or low-pass) folded kernel for subband k.
  const FoldedKernel& center_kernel(int k) const { return center_.at(static_cast<std::size_t>(k)); }
  /// Surround folded kernel for subband k >= 1.
  const FoldedKernel& surround_kernel(int k) const { return surround_.at(static_cast<std::size_t>(k)); }

  /// Normalized sampled 1-D Gaussian taps around `center`, indexed from
  /// ceil(center - radius). Shared by the folded kernels.
  static std::vector<double> gaussian_taps(double sigma, double center, double radius, long long& first);

 private:
  int n_ = 0;
  double gain_ = 0.0;
  std::vector<BandGeometry> bands_;
  std::vector<FoldedKernel> center_;
  std::vector<FoldedKernel> surround_;
};

/// Coefficients of every subband stored contiguously in (k, i, j) row-major
/// order: subband k starts at (4^k - 1) / 3 and holds 2^k x 2^k values,
/// i indexing rows and j columns.
class SubbandPyramid {
 public:
  SubbandPyramid() = default;
  SubbandPyramid(int n, int subbands);

  static std::size_t offset(int k) { return ((std::size_t{1} << (2 * k)) - 1) / 3; }
  static std::size_t total_size(int subbands) { return offset(subbands); }

  int n() const noexcept { return n_; }
  int subbands() const noexcept { return subbands_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<double> band(int k);
  std::span<const double> band(int k) const;
  double& at(int k, int i, int j) { return band(k)[static_cast<std::size_t>(i) * (1u << k) + j]; }
  double at(int k, int i, int j) const { return band(k)[static_cast<std::size_t>(i) * (1u << k) + j]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const SubbandPyramid& other) const {
    return n_ == other.n_ && subbands_ == other.subbands_;
  }

 private:
  int n_ = 0;
  int subbands_ = 0;
  std::vector<double> data_;
};

/// Coefficients gamma * (DoG_k * f) at every lattice center, and the low-pass
/// coefficient gamma * (G_sigma0 * f) at the image center.
SubbandPyramid analyze(const ImagePlane& image, const DoGBank& bank, int threads = 0);

/// Adjoint of analyze (including the gain), with optional per-subband weights.
ImagePlane analyze_adjoint(const SubbandPyramid& pyramid, const DoGBank& bank,
                           std::span<const double> band_weights = {}, int threads = 0);

/// Gain placing the largest band-pass magnitude at `target` amperes. Falls back
/// to `fallback` when the image has no band-pass content.
double calibrate_gain(const ImagePlane& image, const DoGBank& bank, double target, double fallback);

}  // namespace rtc
