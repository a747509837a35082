#include "rtc/decoder.hpp"

#include <algorithm>
#include <cmath>

#include "rtc/error.hpp"

namespace rtc {

LifLut::LifLut(std::vector<double> grid, std::vector<std::uint32_t> counts, std::uint32_t t_eff_us)
    : grid_(std::move(grid)), counts_(std::move(counts)), t_eff_us_(t_eff_us) {
  if (grid_.size() < 2 || grid_.size() != counts_.size()) throw ConfigError("LIF table needs >= 2 matching samples");
  edges_ = plateau_edges(grid_, counts_);
  std::vector<double> y(counts_.begin(), counts_.end());
  table_ = MonotoneLUT(grid_, std::move(y), MonotoneLUT::Rule::Step, false);
}

std::uint32_t LifLut::count(double current) const {
  return static_cast<std::uint32_t>(table_.evaluate(current).value);
}

LifLut::Inverse LifLut::invert(std::uint32_t n) const {
  if (n == 0) return {0.0, false};
  const std::uint32_t top = max_count();
  const bool saturated = n > top;
  if (top == 0) return {grid_.back(), true};
  const std::uint32_t m = std::min(n, top);
  const double lo = edges_[m - 1];
  const double hi = m < top ? edges_[m] : grid_.back();
  return {0.5 * (lo + hi), saturated};
}

LifLut build_lif_lut(const LifResponse& response, std::uint32_t t_eff_us) {
  return LifLut(response.grid(), response.counts(t_eff_us), t_eff_us);
}

LifLut build_lif_lut(double t_eff, const RetinaParams& params, std::span<const double> grid, double dt) {
  if (!(t_eff > 0.0)) throw ConfigError("LIF table window must be positive");
  const LifResponse response(grid, t_eff, params, dt);
  return build_lif_lut(response, static_cast<std::uint32_t>(std::lround(t_eff * 1e6)));
}

std::vector<double> lif_grid(std::span<const MonotoneLUT> inner_maps) {
  double top = 0.0;
  for (const auto& m : inner_maps) top = std::max(top, m.range_max());
  return uniform_grid(codec_constants::kLifDomainFactor * top, codec_constants::kLifGridSize);
}

DecoderTables build_decoder_tables(const StreamHeader& header, std::uint32_t t_obs_us,
                                   std::vector<MonotoneLUT> inner, const LifResponse& response) {
  if (t_obs_us > header.horizon_us) throw ConfigError("observation time beyond the stream horizon");
  if (inner.size() != header.schedule_us.size()) throw ConfigError("one inner map per subband expected");
  DecoderTables tables;
  tables.t_obs_us = t_obs_us;
  tables.params_digest = header.params_digest();
  tables.schedule_us = header.schedule_us;
  tables.inner = std::move(inner);
  tables.lif.resize(header.schedule_us.size());
  for (std::size_t k = 1; k < header.schedule_us.size(); ++k) {
    const std::uint32_t onset = header.schedule_us[k];
    if (t_obs_us >= onset) tables.lif[k] = build_lif_lut(response, t_obs_us - onset);
  }
  return tables;
}

SubbandPyramid decode_coefficients(const SpikeStream& stream, const DecoderTables& tables, DecodeStats* stats) {
  const auto& h = stream.header;
  if (tables.params_digest != h.params_digest() || tables.schedule_us != h.schedule_us) {
    throw ConfigError("decoder tables were built for a different stream");
  }
  const std::uint32_t t_obs = tables.t_obs_us;
  const auto counts = spike_counts(stream, t_obs);
  SubbandPyramid out(h.n, h.subbands);
  DecodeStats local;
  if (t_obs >= h.schedule_us[0]) out.at(0, 0, 0) = h.lowpass;
  for (int k = 1; k < h.subbands; ++k) {
    if (t_obs < h.schedule_us[static_cast<std::size_t>(k)]) continue;
    const auto& lif = tables.lif[static_cast<std::size_t>(k)];
    if (lif.t_eff_us() != t_obs - h.schedule_us[static_cast<std::size_t>(k)]) {
      throw ConfigError("LIF table window does not match the observation time");
    }
    const auto& inner = tables.inner[static_cast<std::size_t>(k)];
    auto band = out.band(k);
    const std::size_t base = SubbandPyramid::offset(k);
    for (std::size_t q = 0; q < band.size(); ++q) {
      const std::uint32_t n = counts[base + q];
      if (n == 0) continue;
      const auto current = lif.invert(n);
      if (current.saturated) ++local.saturated;
      const auto magnitude = invert_inner(current.current, inner);
      if (magnitude.clamped) ++local.inner_clamped;
      band[q] = stream.negative[base + q] ? -magnitude.value : magnitude.value;
    }
  }
  if (stats) *stats = local;
  return out;
}

ImagePlane decode(const SpikeStream& stream, const DecoderTables& tables, const DualBank& dual, DecodeStats* stats) {
  const auto coefficients = decode_coefficients(stream, tables, stats);
  if (tables.t_obs_us < stream.header.schedule_us[0]) return ImagePlane(stream.header.n, stream.header.n, 0.0);
  return synthesize(coefficients, dual);
}

}  // namespace rtc
