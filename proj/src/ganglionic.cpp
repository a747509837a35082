#include "rtc/ganglionic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rtc/parallel.hpp"

namespace rtc {

std::vector<double> lif_spike_times(double current, double duration, const RetinaParams& p, double dt) {
  if (!std::isfinite(current) || current < 0.0) throw ConfigError("LIF drive must be finite and >= 0");
  if (!(duration >= 0.0) || !std::isfinite(duration)) throw ConfigError("LIF duration must be finite and >= 0");
  if (!(dt > 0.0)) throw ConfigError("LIF time step must be positive");
  std::vector<double> spikes;
  const double tau = p.lif_time_constant();
  const double v_inf = current / p.g_l;
  // the membrane approaches v_inf from below and never reaches a threshold at or above it
  if (v_inf <= p.delta || duration == 0.0) return spikes;

  const auto steps = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9));
  const double decay = std::exp(-dt / tau);
  double v = p.v_reset;
  for (std::size_t n = 0; n < steps; ++n) {
    double now = static_cast<double>(n) * dt;
    const double end = n + 1 == steps ? duration : static_cast<double>(n + 1) * dt;
    double v_end = n + 1 < steps ? v_inf + (v - v_inf) * decay : v_inf + (v - v_inf) * std::exp(-(end - now) / tau);
    while (v_end >= p.delta) {
      const double crossing = now + tau * std::log((v - v_inf) / (p.delta - v_inf));
      spikes.push_back(crossing);
      v = p.v_reset;
      now = crossing;
      v_end = v_inf + (v - v_inf) * std::exp(-(end - now) / tau);
    }
    v = v_end;
  }
  return spikes;
}

void SpikeStream::validate() const {
  const auto& h = header;
  if (h.subbands < 1 || h.n != (1 << (h.subbands - 1))) throw ConfigError("stream N and K disagree");
  if (h.schedule_us.size() != static_cast<std::size_t>(h.subbands)) throw ConfigError("schedule length != K");
  if (negative.size() != SubbandPyramid::total_size(h.subbands)) throw ConfigError("sign bits do not cover the pyramid");
  for (std::size_t e = 0; e < events.size(); ++e) {
    const auto& ev = events[e];
    if (ev.k >= h.subbands) throw ConfigError("event " + std::to_string(e) + " has subband out of range");
    if (ev.index >= (1u << (2 * ev.k))) throw ConfigError("event " + std::to_string(e) + " index out of range");
    if (ev.time_us > h.horizon_us) throw ConfigError("event " + std::to_string(e) + " beyond the horizon");
    if (ev.time_us < h.schedule_us[ev.k]) throw ConfigError("event " + std::to_string(e) + " precedes its subband delay");
    if (e > 0 && !(events[e - 1] < ev)) throw ConfigError("events not strictly sorted at " + std::to_string(e));
  }
}

std::uint32_t spike_count(const SpikeStream& stream, int k, int i, int j, std::uint32_t t_obs_us) {
  if (t_obs_us > stream.header.horizon_us) throw ConfigError("observation time beyond the stream horizon");
  const auto index = static_cast<std::uint32_t>(i * (1 << k) + j);
  std::uint32_t count = 0;
  for (const auto& ev : stream.events) {
    if (ev.time_us > t_obs_us) break;
    if (ev.k == k && ev.index == index) ++count;
  }
  return count;
}

std::vector<std::uint32_t> spike_counts(const SpikeStream& stream, std::uint32_t t_obs_us) {
  if (t_obs_us > stream.header.horizon_us) throw ConfigError("observation time beyond the stream horizon");
  std::vector<std::uint32_t> counts(SubbandPyramid::total_size(stream.header.subbands), 0);
  for (const auto& ev : stream.events) {
    if (ev.time_us > t_obs_us) break;
    ++counts[SubbandPyramid::offset(ev.k) + ev.index];
  }
  return counts;
}

SpikeStream truncate_stream(const SpikeStream& stream, std::uint32_t t_us) {
  SpikeStream out;
  out.header = stream.header;
  out.header.horizon_us = std::min(t_us, stream.header.horizon_us);
  out.negative = stream.negative;
  const auto end = std::upper_bound(stream.events.begin(), stream.events.end(), out.header.horizon_us,
                                    [](std::uint32_t t, const SpikeEvent& ev) { return t < ev.time_us; });
  out.events.assign(stream.events.begin(), end);
  return out;
}

LifResponse::LifResponse(std::span<const double> grid, double duration, const RetinaParams& params, double dt,
                         int threads)
    : grid_(grid.begin(), grid.end()), duration_(duration), ticks_(grid_.size()) {
  parallel_for(grid_.size(), threads, [&](std::size_t g) {
    const auto times = lif_spike_times(grid_[g], duration_, params, dt);
    auto& t = ticks_[g];
    t.reserve(times.size());
    for (double s : times) t.push_back(spike_tick(s));
  });
}

std::vector<std::uint32_t> LifResponse::counts(std::uint32_t t_eff_us) const {
  if (static_cast<double>(t_eff_us) > duration_ * 1e6 + 0.5) {
    throw ConfigError("observation window exceeds the simulated LIF duration");
  }
  std::vector<std::uint32_t> out(grid_.size());
  for (std::size_t g = 0; g < grid_.size(); ++g) {
    const auto& t = ticks_[g];
    out[g] = static_cast<std::uint32_t>(std::upper_bound(t.begin(), t.end(), t_eff_us) - t.begin());
  }
  return out;
}

std::vector<double> plateau_edges(std::span<const double> grid, std::span<const std::uint32_t> counts) {
  std::vector<double> edges;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (counts[g] < counts[g - 1]) throw NumericalError("spike counts decrease along the current grid");
    const double mid = 0.5 * (grid[g - 1] + grid[g]);
    for (auto m = counts[g - 1] + 1; m <= counts[g]; ++m) edges.push_back(mid);
  }
  // counts already positive at the first grid point have no resolvable lower edge
  if (!counts.empty() && counts[0] > 0) edges.insert(edges.begin(), counts[0], grid[0]);
  return edges;
}

double estimate_qlif(const LifResponse& response, double t_eff) {
  if (!(t_eff > 0.0)) throw ConfigError("observation window must be positive");
  const auto t_us = static_cast<std::uint32_t>(std::lround(t_eff * 1e6));
  const auto counts = response.counts(t_us);
  const auto edges = plateau_edges(response.grid(), counts);
  // complete plateaus have both edges on the grid; the top one runs off the end
  if (edges.size() < 2) {
    std::ostringstream msg;
    msg << "quantizer not yet live at t_eff=" << t_eff * 1e3 << " ms";
    throw QuantizerNotLive(msg.str());
  }
  return (edges.back() - edges.front()) / static_cast<double>(edges.size() - 1);
}

double estimate_qlif(double t_eff, const RetinaParams& params, std::span<const double> grid, double dt) {
  if (grid.size() < 512) throw ConfigError("Q_lif estimation needs at least 512 grid currents");
  return estimate_qlif(LifResponse(grid, t_eff, params, dt), t_eff);
}

DitherConfig build_dither_config(double t_star, const DelaySchedule& schedule, const RetinaParams& params,
                                 std::span<const double> grid, std::uint64_t seed, double dt) {
  if (grid.size() < 512) throw ConfigError("dither sizing needs at least 512 grid currents");
  for (int k = 0; k < schedule.subbands(); ++k) {
    if (!(t_star > schedule.at(k))) {
      throw ConfigError("t_star must exceed every subband delay (subband " + std::to_string(k) + ")");
    }
  }
  const LifResponse response(grid, t_star - schedule.first(), params, dt);
  DitherConfig cfg{t_star, {}, seed};
  for (int k = 0; k < schedule.subbands(); ++k) {
    try {
      cfg.ranges.push_back(2.0 * estimate_qlif(response, t_star - schedule.at(k)));
    } catch (const QuantizerNotLive& e) {
      throw ConfigError("subband " + std::to_string(k) + ": " + e.what());
    }
  }
  return cfg;
}

SpikeStream encode_ganglionic(const RectifiedPyramid& rectified, const DelaySchedule& schedule,
                              std::uint32_t horizon_us, const DitherConfig* dither, int threads) {
  const auto& currents = rectified.currents;
  const int subbands = currents.subbands();
  if (schedule.subbands() != subbands) throw ConfigError("schedule does not match the pyramid");
  if (dither && dither->ranges.size() != static_cast<std::size_t>(subbands)) {
    throw ConfigError("dither config does not match the pyramid");
  }
  const auto delays_us = schedule.to_microseconds();
  if (horizon_us < delays_us.back()) throw ConfigError("horizon precedes the last subband delay");

  SpikeStream stream;
  auto& h = stream.header;
  h.n = currents.n();
  h.subbands = subbands;
  h.horizon_us = horizon_us;
  h.schedule_us = delays_us;
  h.dithered = dither != nullptr;
  h.seed = dither ? dither->seed : 0;
  h.t_star_us = dither ? static_cast<std::uint32_t>(std::lround(dither->t_star * 1e6)) : 0;
  stream.negative = rectified.negative;

  const std::size_t first = SubbandPyramid::offset(1);
  const std::size_t total = currents.size();
  const int workers = resolve_threads(threads);
  std::vector<std::vector<SpikeEvent>> partial(static_cast<std::size_t>(workers));
  parallel_chunks(total - first, workers, [&](std::size_t begin, std::size_t end, std::size_t w) {
    auto& out = partial[w];
    int k = 1;
    for (std::size_t q = first + begin; q < first + end; ++q) {
      while (q >= SubbandPyramid::offset(k + 1)) ++k;
      const auto index = static_cast<std::uint32_t>(q - SubbandPyramid::offset(k));
      double drive = currents.values()[q];
      if (dither) {
        const int side = 1 << k;
        auto rng = neuron_stream(dither->seed, k, static_cast<int>(index) / side, static_cast<int>(index) % side);
        drive += triangular_dither(dither->ranges[static_cast<std::size_t>(k)], rng);
      }
      drive = std::max(drive, 0.0);
      const std::uint32_t onset = delays_us[static_cast<std::size_t>(k)];
      const double window = static_cast<double>(horizon_us - onset) * 1e-6;
      std::uint32_t previous = 0;
      bool any = false;
      for (double s : lif_spike_times(drive, window, h.params)) {
        const std::uint32_t t = onset + spike_tick(s);
        if (t > horizon_us) break;
        if (any && t == previous) throw NumericalError("LIF drive fires twice within one microsecond");
        out.push_back({t, static_cast<std::uint8_t>(k), index});
        previous = t;
        any = true;
      }
    }
  });
  std::size_t count = 0;
  for (const auto& p : partial) count += p.size();
  stream.events.reserve(count);
  for (auto& p : partial) stream.events.insert(stream.events.end(), p.begin(), p.end());
  std::sort(stream.events.begin(), stream.events.end());
  return stream;
}

}  // namespace rtc
