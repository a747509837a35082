#include "rtc/dog_transform.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "rtc/error.hpp"
#include "rtc/parallel.hpp"

namespace rtc {
namespace {

FoldedKernel fold(const BandGeometry& g, double sigma, int n) {
  FoldedKernel kernel;
  kernel.lo.resize(static_cast<std::size_t>(g.side));
  kernel.weights.resize(static_cast<std::size_t>(g.side));
  std::vector<double> row(static_cast<std::size_t>(n));
  for (int s = 0; s < g.side; ++s) {
    long long first = 0;
    const auto taps = DoGBank::gaussian_taps(sigma, g.center(s), g.radius, first);
    std::fill(row.begin(), row.end(), 0.0);
    int lo = n, hi = -1;
    for (std::size_t t = 0; t < taps.size(); ++t) {
      const int m = mirror_index(first + static_cast<long long>(t), n);
      row[static_cast<std::size_t>(m)] += taps[t];
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    kernel.lo[static_cast<std::size_t>(s)] = lo;
    kernel.weights[static_cast<std::size_t>(s)].assign(row.begin() + lo, row.begin() + hi + 1);
  }
  return kernel;
}

// out[i][j] = sum_{y,x} w_i[y] w_j[x] f[y][x] over the folded kernel.
void separable_sample(std::span<const double> image, int n, const FoldedKernel& kernel,
                      std::span<double> out, double scale) {
  const int side = static_cast<int>(kernel.lo.size());
  std::vector<double> rows(static_cast<std::size_t>(n) * side);
  for (int y = 0; y < n; ++y) {
    const double* src = image.data() + static_cast<std::size_t>(y) * n;
    double* dst = rows.data() + static_cast<std::size_t>(y) * side;
    for (int j = 0; j < side; ++j) {
      const auto& w = kernel.weights[static_cast<std::size_t>(j)];
      const double* f = src + kernel.lo[static_cast<std::size_t>(j)];
      double acc = 0.0;
      for (std::size_t t = 0; t < w.size(); ++t) acc += w[t] * f[t];
      dst[j] = acc;
    }
  }
  for (int i = 0; i < side; ++i) {
    const auto& w = kernel.weights[static_cast<std::size_t>(i)];
    const int lo = kernel.lo[static_cast<std::size_t>(i)];
    double* dst = out.data() + static_cast<std::size_t>(i) * side;
    for (std::size_t t = 0; t < w.size(); ++t) {
      const double* r = rows.data() + static_cast<std::size_t>(lo + static_cast<int>(t)) * side;
      for (int j = 0; j < side; ++j) dst[j] += scale * w[t] * r[j];
    }
  }
}

// Transpose of separable_sample: image[y][x] += scale * sum_{i,j} w_i[y] w_j[x] c[i][j].
void separable_spread(std::span<const double> coeffs, int n, const FoldedKernel& kernel,
                      std::span<double> image, double scale) {
  const int side = static_cast<int>(kernel.lo.size());
  std::vector<double> rows(static_cast<std::size_t>(n) * side, 0.0);
  for (int i = 0; i < side; ++i) {
    const auto& w = kernel.weights[static_cast<std::size_t>(i)];
    const int lo = kernel.lo[static_cast<std::size_t>(i)];
    const double* c = coeffs.data() + static_cast<std::size_t>(i) * side;
    for (std::size_t t = 0; t < w.size(); ++t) {
      double* r = rows.data() + static_cast<std::size_t>(lo + static_cast<int>(t)) * side;
      for (int j = 0; j < side; ++j) r[j] += w[t] * c[j];
    }
  }
  for (int y = 0; y < n; ++y) {
    const double* r = rows.data() + static_cast<std::size_t>(y) * side;
    double* dst = image.data() + static_cast<std::size_t>(y) * n;
    for (int j = 0; j < side; ++j) {
      const double v = scale * r[j];
      if (v == 0.0) continue;
      const auto& w = kernel.weights[static_cast<std::size_t>(j)];
      double* f = dst + kernel.lo[static_cast<std::size_t>(j)];
      for (std::size_t t = 0; t < w.size(); ++t) f[t] += v * w[t];
    }
  }
}

}  // namespace

std::vector<double> DoGBank::gaussian_taps(double sigma, double center, double radius, long long& first) {
  first = static_cast<long long>(std::ceil(center - radius));
  const auto last = static_cast<long long>(std::floor(center + radius));
  std::vector<double> taps(static_cast<std::size_t>(last - first + 1));
  double sum = 0.0;
  for (std::size_t t = 0; t < taps.size(); ++t) {
    const double d = static_cast<double>(first + static_cast<long long>(t)) - center;
    taps[t] = std::exp(-d * d / (2.0 * sigma * sigma));
    sum += taps[t];
  }
  for (double& v : taps) v /= sum;
  return taps;
}

DoGBank::DoGBank(int n, const RetinaParams& params) : n_(n), gain_(params.gamma) {
  if (n < 8 || !std::has_single_bit(static_cast<unsigned>(n))) {
    throw ConfigError("image side must be a power of two >= 8, got " + std::to_string(n));
  }
  if (!(params.sigma_anchor > 0.0) || !(params.sigma_ratio > 1.0)) {
    throw ConfigError("DoG geometry needs sigma_anchor > 0 and sigma_ratio > 1");
  }
  const int subbands = std::countr_zero(static_cast<unsigned>(n)) + 1;
  bands_.resize(static_cast<std::size_t>(subbands));
  center_.resize(bands_.size());
  surround_.resize(bands_.size());
  for (int k = 0; k < subbands; ++k) {
    auto& g = bands_[static_cast<std::size_t>(k)];
    g.k = k;
    g.side = 1 << k;
    g.stride = n >> k;
    if (k == 0) {
      // scaling function shares the widest surround
      g.sigma_c = 0.0;
      g.sigma_s = params.sigma_ratio * params.sigma_anchor * std::ldexp(1.0, subbands - 2);
    } else {
      g.sigma_c = params.sigma_anchor * std::ldexp(1.0, subbands - 1 - k);
      g.sigma_s = params.sigma_ratio * g.sigma_c;
    }
    g.radius = 4.0 * g.sigma_s;
    if (k == 0) {
      center_[0] = fold(g, g.sigma_s, n);
    } else {
      center_[static_cast<std::size_t>(k)] = fold(g, g.sigma_c, n);
      surround_[static_cast<std::size_t>(k)] = fold(g, g.sigma_s, n);
    }
  }
}

DoGBank DoGBank::with_gain(double gamma) const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gain must be finite and positive");
  DoGBank copy = *this;
  copy.gain_ = gamma;
  return copy;
}

SubbandPyramid::SubbandPyramid(int n, int subbands)
    : n_(n), subbands_(subbands), data_(total_size(subbands), 0.0) {}

std::span<double> SubbandPyramid::band(int k) {
  if (k < 0 || k >= subbands_) throw ConfigError("subband index out of range");
  return std::span<double>(data_).subspan(offset(k), std::size_t{1} << (2 * k));
}

std::span<const double> SubbandPyramid::band(int k) const {
  if (k < 0 || k >= subbands_) throw ConfigError("subband index out of range");
  return std::span<const double>(data_).subspan(offset(k), std::size_t{1} << (2 * k));
}

SubbandPyramid analyze(const ImagePlane& image, const DoGBank& bank, int threads) {
  if (image.width() != bank.n() || image.height() != bank.n()) {
    throw ConfigError("image is " + std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                      " but the bank was built for N=" + std::to_string(bank.n()));
  }
  SubbandPyramid out(bank.n(), bank.subbands());
  parallel_for(static_cast<std::size_t>(bank.subbands()), threads, [&](std::size_t kk) {
    const int k = static_cast<int>(kk);
    auto dst = out.band(k);
    separable_sample(image.pixels(), bank.n(), bank.center_kernel(k), dst, bank.gain());
    if (k > 0) separable_sample(image.pixels(), bank.n(), bank.surround_kernel(k), dst, -bank.gain());
  });
  return out;
}

ImagePlane analyze_adjoint(const SubbandPyramid& pyramid, const DoGBank& bank,
                           std::span<const double> band_weights, int threads) {
  if (pyramid.n() != bank.n() || pyramid.subbands() != bank.subbands()) {
    throw ConfigError("pyramid shape does not match the bank");
  }
  if (!band_weights.empty() && band_weights.size() != static_cast<std::size_t>(bank.subbands())) {
    throw ConfigError("one weight per subband expected");
  }
  const int n = bank.n();
  const std::size_t pixels = static_cast<std::size_t>(n) * n;
  std::vector<std::vector<double>> partial(static_cast<std::size_t>(bank.subbands()));
  parallel_for(partial.size(), threads, [&](std::size_t kk) {
    const int k = static_cast<int>(kk);
    auto& buf = partial[kk];
    buf.assign(pixels, 0.0);
    const double w = band_weights.empty() ? 1.0 : band_weights[kk];
    const auto coeffs = pyramid.band(k);
    separable_spread(coeffs, n, bank.center_kernel(k), buf, w * bank.gain());
    if (k > 0) separable_spread(coeffs, n, bank.surround_kernel(k), buf, -w * bank.gain());
  });
  // fixed summation order keeps the result independent of the thread count
  ImagePlane out(n, n);
  auto dst = out.pixels();
  for (const auto& buf : partial) {
    for (std::size_t p = 0; p < pixels; ++p) dst[p] += buf[p];
  }
  return out;
}

double calibrate_gain(const ImagePlane& image, const DoGBank& bank, double target, double fallback) {
  const auto unit = analyze(image, bank.with_gain(1.0));
  double peak = 0.0;
  for (int k = 1; k < unit.subbands(); ++k) {
    for (double v : unit.band(k)) peak = std::max(peak, std::abs(v));
  }
  // a flat image has only floating-point residue in its band-pass subbands
  double scale = 0.0;
  for (double v : image.pixels()) scale = std::max(scale, std::abs(v));
  if (!(peak > 1e-9 * std::max(scale, 1.0))) return fallback;
  return target / peak;
}

}  // namespace rtc
