#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "rtc/decoder.hpp"
#include "rtc/dual_bank.hpp"
#include "rtc/ganglionic.hpp"
#include "rtc/image.hpp"
#include "rtc/params.hpp"

namespace rtc {

/// Delay schedule as carried in the stream (whole microseconds).
DelaySchedule codec_schedule(int subbands, const RetinaParams& params);

/// Inner-layer maps f^g_{t_k} on the version-1 grid.
std::vector<MonotoneLUT> codec_inner_maps(const DelaySchedule& schedule, const RetinaParams& params, int threads = 0);

struct EncodeResult {
  SpikeStream stream;
  SubbandPyramid coefficients;  // analysis output with the calibrated gain
  std::size_t overflow = 0;     // magnitudes clamped by the inner maps
  std::optional<DitherConfig> dither;
};

/// Full encoder: gain calibration, analysis, inner layers, LIF spiking.
/// Throws ConfigError for non-square or non-power-of-two images.
EncodeResult encode_image(const ImagePlane& image, RetinaParams params, const CodecOptions& options);

/// Decoder for every stream sharing one header; tables are cached per
/// observation time and the dual bank is built on first use.
class Decoder {
 public:
  explicit Decoder(const StreamHeader& header, int threads = 0, DualOptions dual_options = {});

  const StreamHeader& header() const noexcept { return header_; }
  const std::vector<MonotoneLUT>& inner_maps() const noexcept { return inner_; }
  const LifResponse& lif_response() const noexcept { return *response_; }
  const DecoderTables& tables(std::uint32_t t_obs_us);
  const DualBank& dual();

  SubbandPyramid coefficients(const SpikeStream& stream, std::uint32_t t_obs_us, DecodeStats* stats = nullptr);
  /// Pixel-unit reconstruction (unclamped).
  ImagePlane image(const SpikeStream& stream, std::uint32_t t_obs_us, DecodeStats* stats = nullptr);

 private:
  StreamHeader header_;
  int threads_ = 0;
  DualOptions dual_options_;
  std::vector<MonotoneLUT> inner_;
  std::unique_ptr<LifResponse> response_;
  std::unique_ptr<DualBank> dual_;
  std::map<std::uint32_t, DecoderTables> cache_;
};

/// Highest-subband error statistics of one decode.
struct ErrorStats {
  double flatness = 0.0;
  double max_correlation = 0.0;  // max |rho| over lags <= max_lag
};

ErrorStats highest_band_error(const SubbandPyramid& original, const SubbandPyramid& decoded, int max_lag = 4);

struct SweepRow {
  double t_obs_ms = 0.0;
  double bpp = 0.0;
  double psnr_db = 0.0;
  double mean_ssim = 0.0;
  double flatness_noiseless = 0.0;
  double flatness_dithered = 0.0;
  double maxcorr_noiseless = 0.0;
  double maxcorr_dithered = 0.0;
};

struct SweepOptions {
  std::vector<double> t_obs_ms{20, 30, 40, 50, 60};
  bool rate_from_dithered = false;  // bpp / psnr / ssim columns from the dithered stream
  int dither_trials = 1;            // seeds options.seed, options.seed + 1, ...
  int max_lag = 4;
};

/// Rate-quality sweep over observation times from one noiseless stream and
/// `dither_trials` dithered streams.
std::vector<SweepRow> run_sweep(const ImagePlane& image, const RetinaParams& params, const CodecOptions& options,
                                const SweepOptions& sweep);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

struct DitherReportRow {
  double t_obs_ms = 0.0;
  double bpp_noiseless = 0.0;
  double bpp_dithered = 0.0;
  double psnr_noiseless = 0.0;
  double psnr_dithered = 0.0;
  double ssim_noiseless = 0.0;
  double ssim_dithered = 0.0;
  double flatness_noiseless = 0.0;
  double flatness_dithered = 0.0;
  double maxcorr_noiseless = 0.0;
  double maxcorr_dithered = 0.0;
};

struct DitherReport {
  DitherConfig config;
  std::vector<DitherReportRow> rows;
  std::vector<ImagePlane> noiseless;  // 8-bit reconstructions, one per row
  std::vector<ImagePlane> dithered;
};

/// Noiseless vs dithered reconstructions at t_star + offsets (default
/// -12, -8, -4, 0 ms).
DitherReport run_dither_report(const ImagePlane& image, const RetinaParams& params, const CodecOptions& options,
                               const std::vector<double>& offsets_ms = {-12, -8, -4, 0});

void write_dither_csv(std::ostream& out, const DitherReport& report);

/// Milliseconds to whole microseconds; rejects negative or non-finite input.
std::uint32_t to_microseconds(double ms);

}  // namespace rtc
