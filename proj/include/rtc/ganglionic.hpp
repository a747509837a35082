#pragma once

#include <compare>
#include <cstdint>
#include <cmath>
#include <span>
#include <vector>

#include "rtc/error.hpp"
#include "rtc/inner_layers.hpp"
#include "rtc/params.hpp"
#include "rtc/rng.hpp"
#include "rtc/temporal_schedule.hpp"

namespace rtc {

/// Spike times (s, relative to drive onset) of a leaky integrate-and-fire
/// neuron c_l dV/dt = -g_l V + I starting from v_reset, with threshold delta
/// and reset to v_reset. Each step of length dt uses the exact exponential
/// update; threshold crossings are located inside the step in closed form.
std::vector<double> lif_spike_times(double current, double duration, const RetinaParams& params,
                                    double dt = codec_constants::kLifDt);

/// Relative spike time rounded up to whole microseconds. A spike at time r is
/// observed at t_obs (integer microseconds) iff spike_tick(r) <= t_obs.
inline std::uint32_t spike_tick(double seconds) {
  return static_cast<std::uint32_t>(std::ceil(seconds * 1e6 - 1e-6));
}

struct SpikeEvent {
  std::uint32_t time_us = 0;
  std::uint8_t k = 0;
  std::uint32_t index = 0;  // i * 2^k + j

  auto operator<=>(const SpikeEvent&) const = default;
};

/// Everything the decoder needs besides the events.
struct StreamHeader {
  int n = 0;
  int subbands = 0;
  std::uint32_t horizon_us = 0;
  bool dithered = false;
  std::uint64_t seed = 0;
  std::uint32_t t_star_us = 0;  // 0 when noiseless
  std::vector<std::uint32_t> schedule_us;
  RetinaParams params;
  double lowpass = 0.0;  // gamma * (G_sigma0 * f) at the image center, in A

  DelaySchedule schedule() const { return DelaySchedule::from_microseconds(schedule_us); }
  std::uint64_t params_digest() const { return params.digest(); }
};

/// Time-ordered spike events plus one sign bit per coefficient.
struct SpikeStream {
  StreamHeader header;
  std::vector<std::uint8_t> negative;  // (k,i,j) order, subband 0 included
  std::vector<SpikeEvent> events;      // sorted by (time, k, index)

  /// Throws ConfigError on the first broken invariant.
  void validate() const;
};

/// Events of neuron (k, i, j) with time <= t_obs_us.
std::uint32_t spike_count(const SpikeStream& stream, int k, int i, int j, std::uint32_t t_obs_us);

/// Counts of every neuron at t_obs_us, in (k,i,j) order.
std::vector<std::uint32_t> spike_counts(const SpikeStream& stream, std::uint32_t t_obs_us);

/// Drops events after t_us and sets the horizon to t_us.
SpikeStream truncate_stream(const SpikeStream& stream, std::uint32_t t_us);

/// Spike times of a LIF neuron for every current on a grid, up to `duration`.
class LifResponse {
 public:
  LifResponse(std::span<const double> grid, double duration, const RetinaParams& params,
              double dt = codec_constants::kLifDt, int threads = 0);

  const std::vector<double>& grid() const noexcept { return grid_; }
  double duration() const noexcept { return duration_; }
  /// Spike counts at each grid current for an observation window of t_eff_us.
  std::vector<std::uint32_t> counts(std::uint32_t t_eff_us) const;

 private:
  std::vector<double> grid_;
  double duration_ = 0.0;
  std::vector<std::vector<std::uint32_t>> ticks_;
};

/// Lower edges of the count plateaus of a non-decreasing step function
/// sampled on `grid`: edges[m - 1] separates counts < m from counts >= m,
/// placed halfway between the bracketing grid points, for m = 1..max count.
std::vector<double> plateau_edges(std::span<const double> grid, std::span<const std::uint32_t> counts);

class QuantizerNotLive : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Mean width of the complete count plateaus (count >= 1) over a grid of at
/// least 512 currents, for an observation window t_eff. Throws
/// QuantizerNotLive when no complete plateau exists yet.
double estimate_qlif(double t_eff, const RetinaParams& params, std::span<const double> grid,
                     double dt = codec_constants::kLifDt);

/// Same estimate from precomputed grid responses.
double estimate_qlif(const LifResponse& response, double t_eff);

/// Zero-mean triangular sample on (-range/2, range/2): (u1 + u2 - 1) * range / 2.
inline double triangular_dither(double range, Rng& rng) {
  const double u1 = open_unit(rng);
  const double u2 = open_unit(rng);
  return (u1 + u2 - 1.0) * 0.5 * range;
}

/// Per-subband triangular dither ranges tuned for observation time t_star.
struct DitherConfig {
  double t_star = 0.0;         // s
  std::vector<double> ranges;  // peak-to-peak, A; twice Q_lif(t_star - t_k)
  std::uint64_t seed = 0;
};

/// ranges[k] = 2 * estimate_qlif(t_star - t_k). Throws ConfigError naming the
/// first subband whose quantizer is not live at t_star.
DitherConfig build_dither_config(double t_star, const DelaySchedule& schedule, const RetinaParams& params,
                                 std::span<const double> grid, std::uint64_t seed,
                                 double dt = codec_constants::kLifDt);

/// LIF encoding of every band-pass neuron. The drive of neuron (k,i,j) is its
/// rectified current plus, when dithered, one triangular sample drawn from
/// the neuron's own substream, held constant from t_k to the horizon.
/// Returns events and sign bits; the caller completes params and low-pass.
SpikeStream encode_ganglionic(const RectifiedPyramid& rectified, const DelaySchedule& schedule,
                              std::uint32_t horizon_us, const DitherConfig* dither, int threads = 0);

}  // namespace rtc
