#include "rtc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

#include <unsupported/Eigen/FFT>

#include "rtc/error.hpp"

namespace rtc {
namespace {

void require_same_size(const ImagePlane& a, const ImagePlane& b) {
  if (a.width() != b.width() || a.height() != b.height()) throw ConfigError("images differ in size");
}

// valid-mode separable filtering with a symmetric kernel
std::vector<double> filter_valid(std::span<const double> img, int w, int h, const std::vector<double>& taps) {
  const int r = static_cast<int>(taps.size());
  const int ow = w - r + 1;
  const int oh = h - r + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int t = 0; t < r; ++t) s += taps[t] * img[static_cast<std::size_t>(y) * w + x + t];
      rows[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int t = 0; t < r; ++t) s += taps[t] * rows[static_cast<std::size_t>(y + t) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

void fft_2d(std::vector<std::complex<double>>& data, int side) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> line(static_cast<std::size_t>(side)), spec;
  for (int y = 0; y < side; ++y) {
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(y) * side, side, line.begin());
    fft.fwd(spec, line);
    std::copy(spec.begin(), spec.end(), data.begin() + static_cast<std::ptrdiff_t>(y) * side);
  }
  for (int x = 0; x < side; ++x) {
    for (int y = 0; y < side; ++y) line[static_cast<std::size_t>(y)] = data[static_cast<std::size_t>(y) * side + x];
    fft.fwd(spec, line);
    for (int y = 0; y < side; ++y) data[static_cast<std::size_t>(y) * side + x] = spec[static_cast<std::size_t>(y)];
  }
}

}  // namespace

double entropy_bpp(std::span<const std::uint32_t> counts, int n, int subbands) {
  if (counts.size() != SubbandPyramid::total_size(subbands)) throw ConfigError("counts do not cover the pyramid");
  const double pixels = static_cast<double>(n) * n;
  double bpp = 0.0;
  for (int k = 1; k < subbands; ++k) {
    const std::size_t base = SubbandPyramid::offset(k);
    const std::size_t size = std::size_t{1} << (2 * k);
    std::map<std::uint32_t, std::size_t> histogram;
    for (std::size_t q = 0; q < size; ++q) ++histogram[counts[base + q]];
    double h = 0.0;
    for (const auto& [symbol, c] : histogram) {
      const double p = static_cast<double>(c) / static_cast<double>(size);
      h -= p * std::log2(p);
    }
    bpp += static_cast<double>(size) / pixels * h;
  }
  return bpp;
}

double entropy_bpp(const SpikeStream& stream, std::uint32_t t_obs_us) {
  const auto counts = spike_counts(stream, t_obs_us);
  return entropy_bpp(counts, stream.header.n, stream.header.subbands);
}

double psnr(const ImagePlane& reference, const ImagePlane& test) {
  require_same_size(reference, test);
  if (reference.empty()) throw ConfigError("empty image");
  double sum = 0.0;
  const auto a = reference.pixels();
  const auto b = test.pixels();
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  if (sum == 0.0) return kInfinitePsnr;
  const double mse = sum / static_cast<double>(a.size());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double mean_ssim(const ImagePlane& reference, const ImagePlane& test) {
  require_same_size(reference, test);
  constexpr int kWindow = 11;
  if (reference.width() < kWindow || reference.height() < kWindow) throw ConfigError("image smaller than the SSIM window");
  std::vector<double> taps(kWindow);
  double norm = 0.0;
  for (int t = 0; t < kWindow; ++t) {
    const double d = t - kWindow / 2;
    taps[t] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
    norm += taps[t];
  }
  for (double& t : taps) t /= norm;

  const int w = reference.width();
  const int h = reference.height();
  const auto x = reference.pixels();
  const auto y = test.pixels();
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mx = filter_valid(x, w, h, taps);
  const auto my = filter_valid(y, w, h, taps);
  const auto sxx = filter_valid(xx, w, h, taps);
  const auto syy = filter_valid(yy, w, h, taps);
  const auto sxy = filter_valid(xy, w, h, taps);

  const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
  double total = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double vx = sxx[i] - mx[i] * mx[i];
    const double vy = syy[i] - my[i] * my[i];
    const double cov = sxy[i] - mx[i] * my[i];
    total += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
             ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
  }
  return total / static_cast<double>(mx.size());
}

ImagePlane as_8bit(const ImagePlane& image) {
  const auto bytes = image.to_8bit();
  return ImagePlane(image.width(), image.height(), std::vector<double>(bytes.begin(), bytes.end()));
}

SubbandPyramid coeff_error(const SubbandPyramid& original, const SubbandPyramid& decoded) {
  if (!original.same_shape(decoded)) throw ConfigError("pyramids differ in shape");
  SubbandPyramid out(original.n(), original.subbands());
  auto dst = out.values();
  const auto a = original.values();
  const auto b = decoded.values();
  for (std::size_t q = 0; q < a.size(); ++q) dst[q] = a[q] - b[q];
  return out;
}

ImagePlane band_field(const SubbandPyramid& pyramid, int k) {
  if (k < 0 || k >= pyramid.subbands()) throw ConfigError("subband out of range");
  const auto band = pyramid.band(k);
  const int side = 1 << k;
  return ImagePlane(side, side, std::vector<double>(band.begin(), band.end()));
}

double CorrelationMap::max_abs() const {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (double v : values_) {
    if (std::isnan(v)) continue;
    if (std::isnan(best) || std::abs(v) > best) best = std::abs(v);
  }
  return best;
}

CorrelationMap cross_correlation_map(const ImagePlane& a, const ImagePlane& b, int max_lag) {
  require_same_size(a, b);
  const int w = a.width();
  const int h = a.height();
  if (max_lag < 0 || max_lag >= std::min(w, h)) throw ConfigError("lag range exceeds the field");
  const int span = 2 * max_lag + 1;
  std::vector<double> rho(static_cast<std::size_t>(span) * span, std::numeric_limits<double>::quiet_NaN());
  for (int dy = -max_lag; dy <= max_lag; ++dy) {
    for (int dx = -max_lag; dx <= max_lag; ++dx) {
      const int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
      const int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
      const double count = static_cast<double>(y1 - y0) * (x1 - x0);
      double ma = 0.0, mb = 0.0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          ma += a.at(x, y);
          mb += b.at(x + dx, y + dy);
        }
      }
      ma /= count;
      mb /= count;
      double saa = 0.0, sbb = 0.0, sab = 0.0;
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          const double da = a.at(x, y) - ma;
          const double db = b.at(x + dx, y + dy) - mb;
          saa += da * da;
          sbb += db * db;
          sab += da * db;
        }
      }
      if (saa > 0.0 && sbb > 0.0) {
        rho[static_cast<std::size_t>((dy + max_lag) * span + dx + max_lag)] =
            std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
      }
    }
  }
  return CorrelationMap(max_lag, std::move(rho));
}

ErrorSpectrum error_spectrum(const ImagePlane& field) {
  const int side = field.width();
  if (field.height() != side || side < 8) throw ConfigError("error spectrum needs a square field of side >= 8");
  const auto px = field.pixels();
  if (std::all_of(px.begin(), px.end(), [](double v) { return v == 0.0; })) {
    throw NumericalError("error spectrum of an all-zero field");
  }
  std::vector<std::complex<double>> data(px.begin(), px.end());
  fft_2d(data, side);
  ErrorSpectrum out{ImagePlane(side, side), 0.0};
  std::vector<double> power;
  power.reserve(data.size() - 1);
  for (std::size_t q = 0; q < data.size(); ++q) {
    const double amp = std::abs(data[q]);
    out.amplitude.pixels()[q] = amp;
    if (q != 0) power.push_back(amp * amp);
  }
  double mean = 0.0;
  for (double p : power) mean += p;
  mean /= static_cast<double>(power.size());
  if (!(mean > 0.0)) {
    out.flatness = 0.0;
    return out;
  }
  // floor keeps empty bins finite
  const double floor = mean * 1e-300;
  double log_mean = 0.0;
  for (double p : power) log_mean += std::log(std::max(p, floor));
  log_mean /= static_cast<double>(power.size());
  out.flatness = std::exp(log_mean) / mean;
  return out;
}

}  // namespace rtc
