// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "rtc/bitstream.hpp"
#include "rtc/codec.hpp"
#include "rtc/error.hpp"
#include "rtc/inner_layers.hpp"
#include "rtc/metrics.hpp"

using namespace rtc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path data_dir() { return RTC_TEST_DATA_DIR; }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ImagePlane random_image(int n, std::uint64_t seed) {
  Rng rng(seed);
  ImagePlane img(n, n);
  for (double& v : img.pixels()) v = 255.0 * open_unit(rng);
  return img;
}

double rel_l2(const ImagePlane& a, const ImagePlane& b) {
  double e = 0.0, r = 0.0;
  for (std::size_t q = 0; q < a.size(); ++q) {
    e += std::pow(a.pixels()[q] - b.pixels()[q], 2);
    r += std::pow(b.pixels()[q], 2);
  }
  return std::sqrt(e / r);
}

bool non_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[i - 1]) return false;
  return true;
}

std::vector<double> lif_domain(const RetinaParams& p) {
  return lif_grid(codec_inner_maps(codec_schedule(9, p), p));
}

Outcome c1_frame() {
  const auto start = std::chrono::steady_clock::now();
  const RetinaParams p;
  double worst = 0.0;
  for (int n : {32, 64}) {
    const auto dual = build_dual_bank(DoGBank(n, p).with_gain(1e-12));
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto img = random_image(n, 1000 * n + seed);
      worst = std::max(worst, rel_l2(synthesize(analyze(img, dual.bank()), dual), img));
    }
  }
  const double t = seconds_since(start);
  return {worst <= 1e-6 && t < 30.0, fmt("max rel L2 %.3g over 40 images, %.1f s", worst, t)};
}

Outcome c2_lif() {
  const RetinaParams p;
  const double tau = p.c_l / p.g_l;
  Rng rng(2);
  double worst = 0.0;
  std::size_t spikes_total = 0;
  bool counts_ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    const double current = p.delta * p.g_l * (1.0 + 1e-3) + open_unit(rng) * 3e-10;
    const double isi = -tau * std::log(1.0 - p.delta * p.g_l / current);
    const auto spikes = lif_spike_times(current, 0.1, p);
    for (std::size_t s = 0; s < spikes.size(); ++s) worst = std::max(worst, std::abs(spikes[s] - (s + 1) * isi));
    const auto expected = static_cast<std::size_t>(std::floor(0.1 / isi));
    if (0.1 - expected * isi > 1e-5 && spikes.size() != expected) counts_ok = false;
    spikes_total += spikes.size();
  }
  return {worst <= 1e-5 && counts_ok,
          fmt("%zu spikes, max |t - t_closed| = %.3g s, counts %s", spikes_total, worst, counts_ok ? "match" : "differ")};
}

std::vector<SweepRow> c3_rows;

Outcome c3_scalability() {
  const auto start = std::chrono::steady_clock::now();
  SweepOptions sweep;
  sweep.dither_trials = 0;
  bool ok = true;
  std::string detail;
  for (const char* name : {"cameraman", "astronaut", "chelsea"}) {
    const auto rows = run_sweep(read_pgm(data_dir() / (std::string(name) + ".pgm")), RetinaParams{}, CodecOptions{}, sweep);
    std::vector<double> bpp, db, ssim;
    for (const auto& r : rows) {
      bpp.push_back(r.bpp);
      db.push_back(r.psnr_db);
      ssim.push_back(r.mean_ssim);
    }
    const bool mono = non_decreasing(bpp) && non_decreasing(db) && non_decreasing(ssim);
    ok = ok && mono;
    detail += fmt("%s %s (%.3f-%.3f bpp, %.2f-%.2f dB); ", name, mono ? "monotone" : "NOT monotone", bpp.front(),
                  bpp.back(), db.front(), db.back());
    if (std::string(name) == "cameraman") c3_rows = rows;
  }
  const double t = seconds_since(start);
  return {ok && t < 300.0, detail + fmt("%.1f s", t)};
}

Outcome c4_quality() {
  auto it = std::find_if(c3_rows.begin(), c3_rows.end(), [](const SweepRow& r) { return r.t_obs_ms == 50.0; });
  if (it == c3_rows.end()) return {false, "no 50 ms row"};
  return {it->psnr_db >= 22.0 && it->bpp <= 2.5 && it->mean_ssim >= 0.7,
          fmt("cameraman @ 50 ms: %.3f bpp, %.2f dB, SSIM %.3f", it->bpp, it->psnr_db, it->mean_ssim)};
}

DitherConfig default_dither(const RetinaParams& p) {
  return build_dither_config(0.052, codec_schedule(9, p), p, lif_domain(p), 1);
}

Outcome c5_dither_sizing() {
  const RetinaParams p;
  const auto cfg = default_dither(p);
  bool increasing = true;
  for (std::size_t k = 1; k < cfg.ranges.size(); ++k) increasing = increasing && cfg.ranges[k] > cfg.ranges[k - 1];
  const LifResponse response(lif_domain(p), 0.1, p);
  std::vector<double> q;
  for (int ms = 20; ms <= 100; ms += 10) q.push_back(estimate_qlif(response, ms * 1e-3));
  bool non_increasing = true;
  for (std::size_t i = 1; i < q.size(); ++i) non_increasing = non_increasing && q[i] <= q[i - 1];
  return {increasing && non_increasing, fmt("Delta_0 %.3g .. Delta_8 %.3g A, Q(20 ms) %.3g .. Q(100 ms) %.3g A",
                                            cfg.ranges.front(), cfg.ranges.back(), q.front(), q.back())};
}

Outcome c6_dither_moments() {
  const RetinaParams p;
  const auto cfg = default_dither(p);
  const int n = 1000000;
  bool ok = true;
  double worst_var = 0.0;
  for (std::size_t k = 0; k < cfg.ranges.size(); ++k) {
    const double range = cfg.ranges[k];
    Rng rng(splitmix64(600 + k));
    double sum = 0.0, sq = 0.0;
    bool inside = true;
    for (int i = 0; i < n; ++i) {
      const double x = triangular_dither(range, rng);
      inside = inside && x > -range / 2 && x < range / 2;
      sum += x;
      sq += x * x;
    }
    const double mean = sum / n;
    const double var_err = std::abs((sq / n - mean * mean) / (range * range / 24) - 1.0);
    worst_var = std::max(worst_var, var_err);
    ok = ok && inside && std::abs(mean) <= 4 * (range / std::sqrt(6.0)) / 1e3 && var_err <= 0.02;
  }
  return {ok, fmt("9 subbands x 1e6 draws, worst variance deviation %.3g%%", 100 * worst_var)};
}

std::vector<SweepRow> c78_rows;

void run_c78() {
  if (!c78_rows.empty()) return;
  SweepOptions sweep;
  sweep.t_obs_ms = {52.0};
  sweep.dither_trials = 20;
  c78_rows = run_sweep(read_pgm(data_dir() / "cameraman.pgm"), RetinaParams{}, CodecOptions{}, sweep);
}

Outcome c7_decorrelation() {
  run_c78();
  const auto& r = c78_rows.front();
  return {r.maxcorr_dithered < r.maxcorr_noiseless,
          fmt("max |rho| noiseless %.4f, dithered %.4f (20 seeds, 52 ms)", r.maxcorr_noiseless, r.maxcorr_dithered)};
}

Outcome c8_whitening() {
  run_c78();
  const auto& r = c78_rows.front();
  return {r.flatness_dithered > r.flatness_noiseless,
          fmt("flatness noiseless %.4f, dithered %.4f (20 seeds, 52 ms)", r.flatness_noiseless, r.flatness_dithered)};
}

Outcome c9_bitstream() {
  const auto image = read_pgm(data_dir() / "cameraman.pgm");
  CodecOptions o;
  o.dither = true;
  o.seed = 77;
  o.threads = 1;
  const auto stream = encode_image(image, RetinaParams{}, o).stream;
  const auto bytes = serialize(stream);
  const bool round_trip = serialize(parse(bytes)) == bytes;

  bool threads_ok = true;
  for (int threads : {2, 8}) {
    o.threads = threads;
    threads_ok = threads_ok && serialize(encode_image(image, RetinaParams{}, o).stream) == bytes;
  }

  Decoder decoder(stream.header);
  Rng rng(9);
  int prefix_ok = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + static_cast<std::size_t>(open_unit(rng) * (stream.events.size() - 1));
    const auto prefix = parse(truncate_records(bytes, m));
    std::uint32_t t = prefix.events.back().time_us;
    // records sharing the cut timestamp were dropped; observe just before it
    if (m < stream.events.size() && stream.events[m].time_us == t) --t;
    const auto a = decoder.image(prefix, t);
    const auto b = decoder.image(stream, t);
    prefix_ok += std::equal(a.pixels().begin(), a.pixels().end(), b.pixels().begin());
  }
  return {round_trip && threads_ok && prefix_ok == 50,
          fmt("%zu bytes, round trip %s, threads 1/2/8 %s, prefixes %d/50", bytes.size(),
              round_trip ? "identical" : "differs", threads_ok ? "identical" : "differ", prefix_ok)};
}

Outcome c10_inner_numerics() {
  const RetinaParams p;
  const auto schedule = codec_schedule(9, p);
  const auto grid = uniform_grid(codec_constants::kInnerCurrentMax, codec_constants::kInnerGridSize);
  const auto coarse = build_inner_maps(schedule, p, grid, codec_constants::kInnerDt);
  const auto fine = build_inner_maps(schedule, p, grid, codec_constants::kInnerDt / 2);
  double worst = 0.0;
  bool monotone = true;
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    monotone = monotone && coarse[k].strict();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double a = coarse[k].ordinates()[i], b = fine[k].ordinates()[i];
      worst = std::max(worst, std::abs(a - b) / std::abs(b));
      if (i > 0) monotone = monotone && a > coarse[k].ordinates()[i - 1];
    }
  }
  const double h = 1e-9;
  const double left = (rectifier(p.v0_g, p) - rectifier(p.v0_g - h, p)) / h;
  const double right = (rectifier(p.v0_g + h, p) - rectifier(p.v0_g, p)) / h;
  const double slope_gap = std::abs(left - right) / p.lambda_g;
  const bool continuous = std::abs(rectifier(p.v0_g + h, p) - rectifier(p.v0_g - h, p)) <= 2 * h * p.lambda_g * 1.001;
  return {worst <= 1e-3 && monotone && slope_gap <= 1e-4 && continuous,
          fmt("dt-halving max rel change %.3g, 9 maps %s, knee slope gap %.2g", worst,
              monotone ? "strictly monotone" : "NOT monotone", slope_gap)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"C1 frame perfect reconstruction", c1_frame},
      {"C2 LIF closed-form spike times", c2_lif},
      {"C3 rate and quality grow with t_obs", c3_scalability},
      {"C4 cameraman quality at 50 ms", c4_quality},
      {"C5 dither sizing", c5_dither_sizing},
      {"C6 dither moments", c6_dither_moments},
      {"C7 dither decorrelates the error", c7_decorrelation},
      {"C8 dither whitens the error", c8_whitening},
      {"C9 bitstream properties", c9_bitstream},
      {"C10 inner-layer numerics", c10_inner_numerics},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
