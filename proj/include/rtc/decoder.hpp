#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rtc/dog_transform.hpp"
#include "rtc/dual_bank.hpp"
#include "rtc/ganglionic.hpp"
#include "rtc/monotone_lut.hpp"

namespace rtc {

/// Current-to-count step map of the LIF stage for one effective window, with
/// its plateau edges kept for inversion.
class LifLut {
 public:
  struct Inverse {
    double current = 0.0;
    bool saturated = false;
  };

  LifLut() = default;
  LifLut(std::vector<double> grid, std::vector<std::uint32_t> counts, std::uint32_t t_eff_us);

  std::uint32_t t_eff_us() const noexcept { return t_eff_us_; }
  std::uint32_t max_count() const noexcept { return counts_.empty() ? 0 : counts_.back(); }
  const std::vector<double>& edges() const noexcept { return edges_; }
  /// Step-rule table current -> count.
  const MonotoneLUT& table() const noexcept { return table_; }
  std::uint32_t count(double current) const;

  /// Midpoint of the plateau producing n (0 A for n = 0). Counts above the
  /// table maximum return the top-plateau midpoint flagged saturated.
  Inverse invert(std::uint32_t n) const;

 private:
  std::vector<double> grid_;
  std::vector<std::uint32_t> counts_;
  std::vector<double> edges_;
  MonotoneLUT table_;
  std::uint32_t t_eff_us_ = 0;
};

/// Tabulates the LIF count map for an effective window t_eff_us from grid
/// responses simulated for at least that long.
LifLut build_lif_lut(const LifResponse& response, std::uint32_t t_eff_us);

/// Same table computed from scratch.
LifLut build_lif_lut(double t_eff, const RetinaParams& params, std::span<const double> grid,
                     double dt = codec_constants::kLifDt);

/// Uniform LIF grid on [0, kLifDomainFactor * largest inner-map ordinate].
std::vector<double> lif_grid(std::span<const MonotoneLUT> inner_maps);

/// Linear inverse of an inner-layer map; ordinates outside its range clamp
/// to the domain ends with the flag set.
inline MonotoneLUT::Lookup invert_inner(double current, const MonotoneLUT& inner_map) {
  return inner_map.inverse(current);
}

/// Decoder lookup tables bound to one observation time and parameter set.
struct DecoderTables {
  std::uint32_t t_obs_us = 0;
  std::uint64_t params_digest = 0;
  std::vector<std::uint32_t> schedule_us;
  std::vector<MonotoneLUT> inner;  // f^g_{t_k}, inverted on use
  std::vector<LifLut> lif;         // window t_obs - t_k; empty before the onset
};

/// Builds tables for decoding `header` at t_obs_us. `response` must cover
/// t_obs_us - t_0 on the LIF grid matching `inner`.
DecoderTables build_decoder_tables(const StreamHeader& header, std::uint32_t t_obs_us,
                                   std::vector<MonotoneLUT> inner, const LifResponse& response);

struct DecodeStats {
  std::size_t saturated = 0;      // counts above the LIF table
  std::size_t inner_clamped = 0;  // currents outside the inner-map range
};

/// Signed transform-domain estimate of every coefficient at the tables' t_obs.
SubbandPyramid decode_coefficients(const SpikeStream& stream, const DecoderTables& tables,
                                   DecodeStats* stats = nullptr);

/// Full reconstruction (pixel units, unclamped).
ImagePlane decode(const SpikeStream& stream, const DecoderTables& tables, const DualBank& dual,
                  DecodeStats* stats = nullptr);

}  // namespace rtc
