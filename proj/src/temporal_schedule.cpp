#include "rtc/temporal_schedule.hpp"

#include <cmath>
#include <limits>

#include "rtc/error.hpp"

namespace rtc {

DelaySchedule::DelaySchedule(std::vector<double> delays, double tau_opl)
    : delays_(std::move(delays)), tau_opl_(tau_opl) {
  if (delays_.empty()) throw ConfigError("delay schedule needs at least one subband");
  if (!(delays_.front() > 0.0)) throw ConfigError("subband delays must be positive");
  for (std::size_t k = 1; k < delays_.size(); ++k) {
    if (!(delays_[k] > delays_[k - 1])) {
      throw ConfigError("subband delays must be strictly increasing (t_" + std::to_string(k) +
                        " <= t_" + std::to_string(k - 1) + ")");
    }
  }
}

DelaySchedule DelaySchedule::from_microseconds(const std::vector<std::uint32_t>& delays_us) {
  std::vector<double> d;
  d.reserve(delays_us.size());
  for (auto us : delays_us) d.push_back(static_cast<double>(us) * 1e-6);
  return DelaySchedule(std::move(d));
}

std::vector<std::uint32_t> DelaySchedule::to_microseconds() const {
  std::vector<std::uint32_t> out;
  out.reserve(delays_.size());
  for (double t : delays_) {
    const double us = std::round(t * 1e6);
    if (us > std::numeric_limits<std::uint32_t>::max()) throw ConfigError("delay too large for microsecond encoding");
    out.push_back(static_cast<std::uint32_t>(us));
  }
  return out;
}

DelaySchedule build_schedule(int subbands, double t_first, double t_last, double tau_opl) {
  if (subbands < 2) throw ConfigError("delay schedule needs K >= 2");
  if (!(t_first > 0.0) || !(t_last > t_first)) {
    throw ConfigError("delay endpoints must satisfy 0 < t_first < t_last");
  }
  if (!(tau_opl > 0.0)) throw ConfigError("tau_opl must be positive");
  const double span = 1.0 - std::exp(-(t_last - t_first) / tau_opl);
  std::vector<double> d(static_cast<std::size_t>(subbands));
  for (int k = 0; k < subbands; ++k) {
    const double frac = static_cast<double>(k) / (subbands - 1);
    d[static_cast<std::size_t>(k)] = t_first - tau_opl * std::log1p(-frac * span);
  }
  // the closed form is exact at k = 0; pin the far end against rounding
  d.front() = t_first;
  d.back() = t_last;
  return DelaySchedule(std::move(d), tau_opl);
}

}  // namespace rtc
