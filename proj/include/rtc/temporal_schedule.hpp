#pragma once

#include <cstdint>
#include <vector>

namespace rtc {

/// Per-subband onset delays t_k in seconds.
class DelaySchedule {
 public:
  DelaySchedule() = default;
  /// Explicit delays; must be strictly increasing and positive.
  explicit DelaySchedule(std::vector<double> delays, double tau_opl = 0.0);

  static DelaySchedule from_microseconds(const std::vector<std::uint32_t>& delays_us);

  int subbands() const noexcept { return static_cast<int>(delays_.size()); }
  double at(int k) const { return delays_.at(static_cast<std::size_t>(k)); }
  const std::vector<double>& delays() const noexcept { return delays_; }
  double first() const { return delays_.front(); }
  double last() const { return delays_.back(); }
  double tau_opl() const noexcept { return tau_opl_; }

  /// Delays rounded to whole microseconds, as stored in the bitstream.
  std::vector<std::uint32_t> to_microseconds() const;

 private:
  std::vector<double> delays_;
  double tau_opl_ = 0.0;
};

/// Exponential-saturation delay law pinned to both endpoints:
///   t_k = t_first - tau * ln(1 - (k / (K-1)) * (1 - exp(-(t_last - t_first) / tau)))
/// Gaps t_{k+1} - t_k grow with k. Requires K >= 2 and 0 < t_first < t_last.
DelaySchedule build_schedule(int subbands, double t_first, double t_last, double tau_opl);

/// value if t >= t_k, else 0.
inline double gate(double value, double t, double t_k) { return t >= t_k ? value : 0.0; }

}  // namespace rtc
