#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace rtc {

/// Physical constants of the retina model plus the DoG geometry.
///
/// Units: conductances in siemens, capacitances in farads, potentials in
/// volts, currents in amperes, times in seconds. Defaults are the
/// biologically realistic values used throughout the codec; `c_l` has no
/// published value and defaults to the bipolar capacitance order (75 ms
/// membrane time constant).
struct RetinaParams {
  // contrast gain control (bipolar layer)
  double g0_b = 8e-10;
  double tau_b = 12e-3;
  double lambda_b = 9e-7;  // S / V^2
  double c_b = 1.5e-10;

  // transient filter and rectification
  double v0_g = 4e-3;
  double i0_g = 15e-12;
  double w_g = 0.8;
  double tau_g = 16e-3;
  double lambda_g = 12e-9;

  // leaky integrate-and-fire ganglion cells
  double delta = 2e-3;
  double g_l = 2e-9;
  double c_l = 1.5e-10;
  double v_reset = 0.0;

  // subband delays
  double t_first = 10e-3;
  double t_last = 38e-3;
  double tau_opl = 65e-3;

  // DoG geometry: finest center sigma (px) and surround/center ratio
  double sigma_anchor = 0.5;
  double sigma_ratio = 3.0;

  // pixel-intensity to current gain (A per 8-bit level); recalibrated per encode
  double gamma = 4e-13;

  /// Throws ConfigError when a constant is outside its physical range.
  void validate() const;

  /// LIF firing threshold current delta * g_l.
  double lif_threshold_current() const { return delta * g_l; }
  /// LIF membrane time constant c_l / g_l.
  double lif_time_constant() const { return c_l / g_l; }

  /// Parameter block stored in the bitstream, fixed order:
  /// g0_b, tau_b, lambda_b, c_b, v0_g, i0_g, w_g, tau_g, lambda_g,
  /// delta, g_l, c_l, v_reset, sigma_anchor, sigma_ratio, gamma.
  std::array<double, 16> to_block() const;
  /// Inverse of to_block. Delay endpoints are left at their defaults since the
  /// bitstream carries the explicit schedule instead.
  static RetinaParams from_block(const std::array<double, 16>& block);

  /// FNV-1a over the little-endian bytes of to_block().
  std::uint64_t digest() const;

  /// Sets a field from its config-file key. Returns false for unknown keys.
  bool set(const std::string& key, double value);
};

/// Fixed numerical settings of bitstream version 1. These are not carried in
/// the stream, so encoder and decoder always agree on them.
namespace codec_constants {
inline constexpr double kInnerCurrentMax = 2e-10;  // upper end of the inner-layer LUT domain (A)
inline constexpr int kInnerGridSize = 512;
inline constexpr double kInnerDt = 1e-5;
inline constexpr double kLifDt = 1e-5;
inline constexpr int kLifGridSize = 2048;
inline constexpr double kLifDomainFactor = 1.5;  // LIF grid top relative to the largest inner output
inline constexpr int kDualMaxIterations = 500;
inline constexpr double kDualTolerance = 1e-8;
}  // namespace codec_constants

/// Encoder options that are not physical constants.
struct CodecOptions {
  double horizon_ms = 100.0;
  bool dither = false;
  double t_star_ms = 52.0;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
};

/// Parses a key=value configuration file ('#' starts a comment). Physical keys
/// map onto RetinaParams fields (same names as the struct); horizon_ms,
/// dither, t_star_ms, seed and threads map onto CodecOptions.
void load_config(const std::filesystem::path& path, RetinaParams& params, CodecOptions& options);

/// Same as load_config but from an in-memory key/value map.
void apply_config(const std::map<std::string, std::string>& entries, RetinaParams& params,
                  CodecOptions& options);

}  // namespace rtc
