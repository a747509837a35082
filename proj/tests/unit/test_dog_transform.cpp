#include <doctest.h>

#include <cmath>
#include <vector>

#include "rtc/dog_transform.hpp"
#include "rtc/dual_bank.hpp"
#include "rtc/error.hpp"
#include "support.hpp"

using namespace rtc;

namespace {

// Independent dense evaluation: sample a 2-D Gaussian window directly on the
// mirrored image, no folding or separability.
std::vector<double> dense_taps(double sigma, double c, double radius, long long& first) {
  first = static_cast<long long>(std::ceil(c - radius));
  const long long last = static_cast<long long>(std::floor(c + radius));
  std::vector<double> w;
  double sum = 0.0;
  for (long long m = first; m <= last; ++m) {
    w.push_back(std::exp(-(m - c) * (m - c) / (2.0 * sigma * sigma)));
    sum += w.back();
  }
  for (double& v : w) v /= sum;
  return w;
}

double dense_gaussian(const ImagePlane& f, double sigma, double cx, double cy, double radius) {
  long long fx = 0, fy = 0;
  const auto wx = dense_taps(sigma, cx, radius, fx);
  const auto wy = dense_taps(sigma, cy, radius, fy);
  const int n = f.width();
  double s = 0.0;
  for (std::size_t a = 0; a < wy.size(); ++a) {
    for (std::size_t b = 0; b < wx.size(); ++b) {
      const int y = mirror_index(fy + static_cast<long long>(a), n);
      const int x = mirror_index(fx + static_cast<long long>(b), n);
      s += wy[a] * wx[b] * f.at(x, y);
    }
  }
  return s;
}

SubbandPyramid dense_analyze(const ImagePlane& f, int subbands, double gamma) {
  const int n = f.width();
  SubbandPyramid out(n, subbands);
  for (int k = 0; k < subbands; ++k) {
    const int side = 1 << k;
    const int stride = n / side;
    const double sigma_c = 0.5 * std::pow(2.0, subbands - 1 - k);
    const double sigma_s = 3.0 * sigma_c;
    if (k == 0) {
      const double s0 = 3.0 * 0.5 * std::pow(2.0, subbands - 2);
      const double c = 0.5 * (n - 1);
      out.at(0, 0, 0) = gamma * dense_gaussian(f, s0, c, c, 4.0 * s0);
      continue;
    }
    for (int i = 0; i < side; ++i) {
      for (int j = 0; j < side; ++j) {
        const double cy = i * stride + 0.5 * (stride - 1);
        const double cx = j * stride + 0.5 * (stride - 1);
        const double r = 4.0 * sigma_s;
        out.at(k, i, j) = gamma * (dense_gaussian(f, sigma_c, cx, cy, r) - dense_gaussian(f, sigma_s, cx, cy, r));
      }
    }
  }
  return out;
}

double max_rel(const SubbandPyramid& a, const SubbandPyramid& b) {
  double peak = 0.0, err = 0.0;
  for (std::size_t q = 0; q < a.size(); ++q) {
    peak = std::max(peak, std::abs(b.values()[q]));
    err = std::max(err, std::abs(a.values()[q] - b.values()[q]));
  }
  return err / peak;
}

}  // namespace

TEST_CASE("bank geometry follows the dyadic law") {
  const RetinaParams p;
  const DoGBank bank(256, p);
  CHECK(bank.subbands() == 9);
  for (int k = 0; k < 9; ++k) CHECK(bank.band(k).side == (1 << k));
  for (int k = 1; k + 1 < 9; ++k) {
    CHECK(bank.band(k + 1).sigma_c == doctest::Approx(bank.band(k).sigma_c / 2).epsilon(1e-15));
    CHECK(bank.band(k + 1).sigma_s == doctest::Approx(bank.band(k).sigma_s / 2).epsilon(1e-15));
    CHECK(bank.band(k).sigma_s > bank.band(k).sigma_c);
  }
  const DoGBank small(64, p);
  CHECK(small.band(small.subbands() - 1).sigma_c == 0.5);
  CHECK(small.band(small.subbands() - 1).sigma_s == 1.5);
  CHECK(SubbandPyramid::total_size(9) == (std::size_t{1} << 18) / 3);
}

TEST_CASE("non-power-of-two sizes are rejected") {
  const RetinaParams p;
  CHECK_THROWS_AS(DoGBank(48, p), ConfigError);
  CHECK_THROWS_AS(DoGBank(4, p), ConfigError);
  const DoGBank bank(16, p);
  CHECK_THROWS_AS(analyze(ImagePlane(32, 32), bank), ConfigError);
}

TEST_CASE("mirror extension is half-sample symmetric") {
  CHECK(mirror_index(-1, 8) == 0);
  CHECK(mirror_index(-2, 8) == 1);
  CHECK(mirror_index(8, 8) == 7);
  CHECK(mirror_index(9, 8) == 6);
  CHECK(mirror_index(16, 8) == 0);
  CHECK(mirror_index(-17, 8) == 0);
}

TEST_CASE("taps of every band-pass filter sum to zero") {
  const RetinaParams p;
  const DoGBank bank(64, p);
  for (int k = 1; k < bank.subbands(); ++k) {
    const auto& g = bank.band(k);
    long long f1 = 0, f2 = 0;
    const auto c = DoGBank::gaussian_taps(g.sigma_c, g.center(0), g.radius, f1);
    const auto s = DoGBank::gaussian_taps(g.sigma_s, g.center(0), g.radius, f2);
    double sum = 0.0, l1 = 0.0;
    // 2-D DoG = c c^T - s s^T
    for (double a : c)
      for (double b : c) sum += a * b, l1 += a * b;
    for (double a : s)
      for (double b : s) sum -= a * b, l1 += a * b;
    CHECK(std::abs(sum) <= 1e-9 * l1);
  }
}

TEST_CASE("constant and zero images") {
  const RetinaParams p;
  const DoGBank bank = DoGBank(32, p).with_gain(1e-12);
  const auto c = analyze(ImagePlane(32, 32, 100.0), bank);
  for (int k = 1; k < bank.subbands(); ++k)
    for (double v : c.band(k)) CHECK(std::abs(v) <= 1e-9 * 1e-12 * 100.0);
  CHECK(c.at(0, 0, 0) == doctest::Approx(1e-12 * 100.0).epsilon(1e-12));
  const auto z = analyze(ImagePlane(32, 32, 0.0), bank);
  for (double v : z.values()) CHECK(v == 0.0);
}

TEST_CASE("fast analysis equals the dense convolution oracle") {
  const RetinaParams p;
  for (int n : {16, 64}) {
    CAPTURE(n);
    const auto img = test::random_image(n, 1234 + n);
    const DoGBank bank = DoGBank(n, p).with_gain(3e-13);
    const auto fast = analyze(img, bank);
    const auto dense = dense_analyze(img, bank.subbands(), 3e-13);
    CHECK(max_rel(fast, dense) <= 1e-10);
  }
}

TEST_CASE("analysis is linear") {
  const RetinaParams p;
  const DoGBank bank = DoGBank(32, p).with_gain(1e-12);
  const auto f = test::random_image(32, 5);
  const auto g = test::random_image(32, 6);
  ImagePlane h(32, 32);
  for (std::size_t q = 0; q < h.size(); ++q) h.pixels()[q] = 2.5 * f.pixels()[q] - 0.75 * g.pixels()[q];
  const auto af = analyze(f, bank), ag = analyze(g, bank), ah = analyze(h, bank);
  SubbandPyramid combo(32, bank.subbands());
  for (std::size_t q = 0; q < combo.size(); ++q) combo.values()[q] = 2.5 * af.values()[q] - 0.75 * ag.values()[q];
  CHECK(max_rel(ah, combo) <= 1e-10);
}

TEST_CASE("adjoint matches the analysis operator") {
  const RetinaParams p;
  const DoGBank bank = DoGBank(32, p).with_gain(2.0);
  const auto x = test::random_image(32, 11, 1.0);
  Rng rng(12);
  SubbandPyramid y(32, bank.subbands());
  for (double& v : y.values()) v = open_unit(rng) - 0.5;
  const auto ax = analyze(x, bank);
  const auto aty = analyze_adjoint(y, bank);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t q = 0; q < y.size(); ++q) lhs += ax.values()[q] * y.values()[q];
  for (std::size_t q = 0; q < x.size(); ++q) rhs += x.pixels()[q] * aty.pixels()[q];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("gain calibration targets the inner-layer domain") {
  const RetinaParams p;
  const DoGBank bank(32, p);
  const auto img = test::random_image(32, 3);
  const double g = calibrate_gain(img, bank, 2e-10, 4e-13);
  const auto c = analyze(img, bank.with_gain(g));
  double peak = 0.0;
  for (int k = 1; k < c.subbands(); ++k)
    for (double v : c.band(k)) peak = std::max(peak, std::abs(v));
  CHECK(peak == doctest::Approx(2e-10).epsilon(1e-12));
  CHECK(calibrate_gain(ImagePlane(32, 32, 7.0), bank, 2e-10, 4e-13) == 4e-13);
}
