#include "rtc/codec.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "rtc/error.hpp"
#include "rtc/inner_layers.hpp"
#include "rtc/metrics.hpp"

namespace rtc {

std::uint32_t to_microseconds(double ms) {
  if (!std::isfinite(ms) || ms < 0.0 || ms > 4.0e6) throw ConfigError("time in ms out of range");
  return static_cast<std::uint32_t>(std::llround(ms * 1e3));
}

DelaySchedule codec_schedule(int subbands, const RetinaParams& params) {
  const auto exact = build_schedule(subbands, params.t_first, params.t_last, params.tau_opl);
  return DelaySchedule::from_microseconds(exact.to_microseconds());
}

std::vector<MonotoneLUT> codec_inner_maps(const DelaySchedule& schedule, const RetinaParams& params, int threads) {
  const auto grid = uniform_grid(codec_constants::kInnerCurrentMax, codec_constants::kInnerGridSize);
  return build_inner_maps(schedule, params, grid, codec_constants::kInnerDt, threads);
}

EncodeResult encode_image(const ImagePlane& image, RetinaParams params, const CodecOptions& options) {
  params.validate();
  if (image.width() != image.height()) throw ConfigError("image must be square");
  const DoGBank unit(image.width(), params);
  params.gamma = calibrate_gain(image, unit, codec_constants::kInnerCurrentMax, params.gamma);
  const DoGBank bank = unit.with_gain(params.gamma);

  EncodeResult result;
  result.coefficients = analyze(image, bank, options.threads);
  const auto schedule = codec_schedule(bank.subbands(), params);
  const auto maps = codec_inner_maps(schedule, params, options.threads);
  const auto rectified = apply_inner_layers(result.coefficients, maps);
  result.overflow = rectified.overflow;
  if (options.dither) {
    result.dither = build_dither_config(options.t_star_ms * 1e-3, schedule, params, lif_grid(maps), options.seed);
  }
  result.stream = encode_ganglionic(rectified, schedule, to_microseconds(options.horizon_ms),
                                    result.dither ? &*result.dither : nullptr, options.threads);
  result.stream.header.params = params;
  result.stream.header.lowpass = result.coefficients.at(0, 0, 0);
  return result;
}

Decoder::Decoder(const StreamHeader& header, int threads, DualOptions dual_options)
    : header_(header), threads_(threads), dual_options_(dual_options) {
  header_.params.validate();
  dual_options_.threads = threads;
  const auto schedule = header_.schedule();
  inner_ = codec_inner_maps(schedule, header_.params, threads_);
  const auto grid = lif_grid(inner_);
  const double window = static_cast<double>(header_.horizon_us - header_.schedule_us.front()) * 1e-6;
  response_ = std::make_unique<LifResponse>(grid, window, header_.params, codec_constants::kLifDt, threads_);
}

const DecoderTables& Decoder::tables(std::uint32_t t_obs_us) {
  auto it = cache_.find(t_obs_us);
  if (it == cache_.end()) {
    it = cache_.emplace(t_obs_us, build_decoder_tables(header_, t_obs_us, inner_, *response_)).first;
  }
  return it->second;
}

const DualBank& Decoder::dual() {
  if (!dual_) {
    const DoGBank bank = DoGBank(header_.n, header_.params).with_gain(header_.params.gamma);
    dual_ = std::make_unique<DualBank>(build_dual_bank(bank, dual_options_));
  }
  return *dual_;
}

SubbandPyramid Decoder::coefficients(const SpikeStream& stream, std::uint32_t t_obs_us, DecodeStats* stats) {
  return decode_coefficients(stream, tables(t_obs_us), stats);
}

ImagePlane Decoder::image(const SpikeStream& stream, std::uint32_t t_obs_us, DecodeStats* stats) {
  const auto& t = tables(t_obs_us);
  if (t_obs_us < header_.schedule_us.front()) {
    decode_coefficients(stream, t, stats);
    return ImagePlane(header_.n, header_.n, 0.0);
  }
  return decode(stream, t, dual(), stats);
}

ErrorStats highest_band_error(const SubbandPyramid& original, const SubbandPyramid& decoded, int max_lag) {
  const int k = original.subbands() - 1;
  const auto error = band_field(coeff_error(original, decoded), k);
  const auto input = band_field(original, k);
  ErrorStats s;
  s.flatness = error_spectrum(error).flatness;
  s.max_correlation = cross_correlation_map(error, input, max_lag).max_abs();
  return s;
}

std::vector<SweepRow> run_sweep(const ImagePlane& image, const RetinaParams& params, const CodecOptions& options,
                                const SweepOptions& sweep) {
  CodecOptions plain = options;
  plain.dither = false;
  const auto noiseless = encode_image(image, params, plain);
  Decoder decoder(noiseless.stream.header, options.threads);

  std::vector<EncodeResult> dithered;
  for (int trial = 0; trial < sweep.dither_trials; ++trial) {
    CodecOptions noisy = options;
    noisy.dither = true;
    noisy.seed = options.seed + static_cast<std::uint64_t>(trial);
    dithered.push_back(encode_image(image, params, noisy));
  }
  if (sweep.rate_from_dithered && dithered.empty()) throw ConfigError("dithered rate columns need >= 1 trial");

  const auto reference = as_8bit(image);
  std::vector<SweepRow> rows;
  for (double t_ms : sweep.t_obs_ms) {
    const auto t_us = to_microseconds(t_ms);
    SweepRow row;
    row.t_obs_ms = t_ms;
    const auto& rate_stream = sweep.rate_from_dithered ? dithered.front().stream : noiseless.stream;
    row.bpp = entropy_bpp(rate_stream, t_us);
    const auto decoded = as_8bit(decoder.image(rate_stream, t_us));
    row.psnr_db = psnr(reference, decoded);
    row.mean_ssim = mean_ssim(reference, decoded);

    const auto plain_stats =
        highest_band_error(noiseless.coefficients, decoder.coefficients(noiseless.stream, t_us), sweep.max_lag);
    row.flatness_noiseless = plain_stats.flatness;
    row.maxcorr_noiseless = plain_stats.max_correlation;
    if (dithered.empty()) {
      row.flatness_dithered = std::nan("");
      row.maxcorr_dithered = std::nan("");
    } else {
      for (const auto& d : dithered) {
        const auto s = highest_band_error(d.coefficients, decoder.coefficients(d.stream, t_us), sweep.max_lag);
        row.flatness_dithered += s.flatness;
        row.maxcorr_dithered += s.max_correlation;
      }
      row.flatness_dithered /= static_cast<double>(dithered.size());
      row.maxcorr_dithered /= static_cast<double>(dithered.size());
    }
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "t_obs_ms,bpp,psnr_db,mean_ssim,flatness_noiseless,flatness_dithered,maxcorr_noiseless,maxcorr_dithered\n";
  out << std::setprecision(8);
  for (const auto& r : rows) {
    out << r.t_obs_ms << ',' << r.bpp << ',' << r.psnr_db << ',' << r.mean_ssim << ',' << r.flatness_noiseless << ','
        << r.flatness_dithered << ',' << r.maxcorr_noiseless << ',' << r.maxcorr_dithered << '\n';
  }
}

DitherReport run_dither_report(const ImagePlane& image, const RetinaParams& params, const CodecOptions& options,
                               const std::vector<double>& offsets_ms) {
  CodecOptions plain = options;
  plain.dither = false;
  CodecOptions noisy = options;
  noisy.dither = true;
  const auto a = encode_image(image, params, plain);
  const auto b = encode_image(image, params, noisy);
  Decoder decoder(a.stream.header, options.threads);
  const auto reference = as_8bit(image);

  DitherReport report;
  report.config = *b.dither;
  for (double offset : offsets_ms) {
    const double t_ms = options.t_star_ms + offset;
    const auto t_us = to_microseconds(t_ms);
    DitherReportRow row;
    row.t_obs_ms = t_ms;
    row.bpp_noiseless = entropy_bpp(a.stream, t_us);
    row.bpp_dithered = entropy_bpp(b.stream, t_us);
    auto img_a = as_8bit(decoder.image(a.stream, t_us));
    auto img_b = as_8bit(decoder.image(b.stream, t_us));
    row.psnr_noiseless = psnr(reference, img_a);
    row.psnr_dithered = psnr(reference, img_b);
    row.ssim_noiseless = mean_ssim(reference, img_a);
    row.ssim_dithered = mean_ssim(reference, img_b);
    const auto sa = highest_band_error(a.coefficients, decoder.coefficients(a.stream, t_us));
    const auto sb = highest_band_error(b.coefficients, decoder.coefficients(b.stream, t_us));
    row.flatness_noiseless = sa.flatness;
    row.flatness_dithered = sb.flatness;
    row.maxcorr_noiseless = sa.max_correlation;
    row.maxcorr_dithered = sb.max_correlation;
    report.rows.push_back(row);
    report.noiseless.push_back(std::move(img_a));
    report.dithered.push_back(std::move(img_b));
  }
  return report;
}

void write_dither_csv(std::ostream& out, const DitherReport& report) {
  out << "t_obs_ms,bpp_noiseless,bpp_dithered,psnr_noiseless,psnr_dithered,ssim_noiseless,ssim_dithered,"
         "flatness_noiseless,flatness_dithered,maxcorr_noiseless,maxcorr_dithered\n";
  out << std::setprecision(8);
  for (const auto& r : report.rows) {
    out << r.t_obs_ms << ',' << r.bpp_noiseless << ',' << r.bpp_dithered << ',' << r.psnr_noiseless << ','
        << r.psnr_dithered << ',' << r.ssim_noiseless << ',' << r.ssim_dithered << ',' << r.flatness_noiseless << ','
        << r.flatness_dithered << ',' << r.maxcorr_noiseless << ',' << r.maxcorr_dithered << '\n';
  }
}

}  // namespace rtc
